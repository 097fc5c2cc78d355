"""Outcome-generating micro-models and a seeded Monte Carlo estimator.

Three models are provided:

* ``QM_SINGLET`` reproduces the singlet statistics for one pair of settings.
  It only knows the measured readings (a, b).
* ``SIGNCOS_LHV`` is the classic local hidden-variable model: a shared
  angle lambda fixes every reading as ``+-sign(cos(theta - lambda))``.
* ``SEQUENTIAL_CMR`` lets Alice's readings come from the sign-cos rule and
  Bob's readings be conditional flips of Alice's, so the cross correlations
  match quantum mechanics while the same-side ones follow the linear law.

Randomness contract: trial ``i`` of a run with seed ``s`` consumes the four
64-bit words of Philox block ``i`` under key ``s``.  Any shard of trials can
therefore be generated independently and the aggregate does not depend on
how trials are split across workers.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import CorrelationSet, Quadruplet, correlation_from_sums
from .errors import PreconditionError, UsageError

WORDS_PER_TRIAL = 4
DEFAULT_SHARD = 1 << 16


class Capability(enum.Enum):
    CROSS_ONLY = "cross_only"
    FULL_CMR = "full_cmr"


class ModelKind(enum.Enum):
    QM_SINGLET = "qm_singlet"
    SIGNCOS_LHV = "signcos_lhv"
    SEQUENTIAL_CMR = "sequential_cmr"


_ALIASES = {
    "qm": ModelKind.QM_SINGLET,
    "qm_singlet": ModelKind.QM_SINGLET,
    "singlet": ModelKind.QM_SINGLET,
    "lhv": ModelKind.SIGNCOS_LHV,
    "signcos": ModelKind.SIGNCOS_LHV,
    "signcos_lhv": ModelKind.SIGNCOS_LHV,
    "sequential": ModelKind.SEQUENTIAL_CMR,
    "sequential_cmr": ModelKind.SEQUENTIAL_CMR,
}

_TRUE = {"true", "1", "yes", "on"}
_FALSE = {"false", "0", "no", "off"}


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    shared_noise: bool = False

    @property
    def capability(self) -> Capability:
        if self.kind is ModelKind.QM_SINGLET:
            return Capability.CROSS_ONLY
        return Capability.FULL_CMR

    def to_clause(self) -> str:
        if self.kind is ModelKind.SEQUENTIAL_CMR:
            return f"{self.kind.value},shared_noise={str(self.shared_noise).lower()}"
        return self.kind.value


def parse_model_clause(clause: str) -> ModelSpec:
    """Parse ``kind[,key=value...]``, e.g. ``sequential,shared_noise=true``."""
    parts = [p.strip() for p in clause.split(",") if p.strip()]
    if not parts:
        raise UsageError("empty model clause")
    name = parts[0].lower().replace("-", "_")
    if name not in _ALIASES:
        raise UsageError(f"unknown model kind {parts[0]!r}; expected one of {sorted(_ALIASES)}")
    kind = _ALIASES[name]
    shared = False
    for p in parts[1:]:
        key, sep, val = p.partition("=")
        key = key.strip().lower().replace("-", "_")
        val = val.strip().lower()
        if not sep or key != "shared_noise" or kind is not ModelKind.SEQUENTIAL_CMR:
            raise UsageError(f"unsupported model parameter {p!r} for {kind.value}")
        if val in _TRUE:
            shared = True
        elif val in _FALSE:
            shared = False
        else:
            raise UsageError(f"shared_noise expects a boolean, got {val!r}")
    return ModelSpec(kind, shared)


class OutcomePair(NamedTuple):
    a: int
    b: int


class OutcomeQuadruple(NamedTuple):
    a: int
    a_prime: int
    b: int
    b_prime: int


def trial_uniforms(seed: int, start: int, stop: int) -> np.ndarray:
    """Uniforms on [0, 1) for trials ``start..stop-1``, shape ``(stop - start, 4)``."""
    if seed < 0:
        raise UsageError("seed must be non-negative")
    bitgen = np.random.Philox(key=seed)
    if start:
        bitgen.advance(start)
    raw = bitgen.random_raw((stop - start) * WORDS_PER_TRIAL)
    return ((raw >> np.uint64(11)) * (1.0 / 9007199254740992.0)).reshape(-1, WORDS_PER_TRIAL)


def _sign(x):
    # sign(0) resolves to +1
    return np.where(x >= 0, 1, -1).astype(np.int8)


def _flip_against(x, u, p_anti):
    """Return -x where u < p_anti, else x."""
    return np.where(u < p_anti, -x, x).astype(np.int8)


def qm_singlet_outcomes(theta_a: float, theta_b: float, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Readings with P(a, b) = (1 - a b cos(theta_a - theta_b)) / 4."""
    a = np.where(u[:, 0] < 0.5, 1, -1).astype(np.int8)
    p_anti = math.cos((theta_a - theta_b) / 2.0) ** 2
    return a, _flip_against(a, u[:, 1], p_anti)


def signcos_outcomes(q: Quadruplet, u: np.ndarray) -> tuple[np.ndarray, ...]:
    lam = 2.0 * math.pi * u[:, 0]
    return (
        _sign(np.cos(q.theta_a - lam)),
        _sign(np.cos(q.theta_a_prime - lam)),
        -_sign(np.cos(q.theta_b - lam)),
        -_sign(np.cos(q.theta_b_prime - lam)),
    )


def sequential_outcomes(q: Quadruplet, u: np.ndarray, shared_noise: bool) -> tuple[np.ndarray, ...]:
    lam = 2.0 * math.pi * u[:, 0]
    a = _sign(np.cos(q.theta_a - lam))
    ap = _sign(np.cos(q.theta_a_prime - lam))
    noise_b = u[:, 1]
    noise_bp = u[:, 1] if shared_noise else u[:, 2]
    b = _flip_against(a, noise_b, math.cos((q.theta_a - q.theta_b) / 2.0) ** 2)
    bp = _flip_against(ap, noise_bp, math.cos((q.theta_a_prime - q.theta_b_prime) / 2.0) ** 2)
    return a, ap, b, bp


def outcomes(spec: ModelSpec, q: Quadruplet, u: np.ndarray) -> dict[str, np.ndarray]:
    """Readings of every trial whose hidden draws are the rows of ``u``."""
    if spec.kind is ModelKind.QM_SINGLET:
        a, b = qm_singlet_outcomes(q.theta_a, q.theta_b, u)
        return {"a": a, "b": b}
    if spec.kind is ModelKind.SIGNCOS_LHV:
        vals = signcos_outcomes(q, u)
    else:
        vals = sequential_outcomes(q, u, spec.shared_noise)
    return dict(zip(("a", "a_prime", "b", "b_prime"), vals))


def _rng_uniforms(rng: np.random.Generator) -> np.ndarray:
    return rng.random(WORDS_PER_TRIAL).reshape(1, WORDS_PER_TRIAL)


def sample_qm_singlet(theta_a: float, theta_b: float, rng: np.random.Generator) -> OutcomePair:
    a, b = qm_singlet_outcomes(theta_a, theta_b, _rng_uniforms(rng))
    return OutcomePair(int(a[0]), int(b[0]))


def sample_signcos_lhv(q: Quadruplet, rng: np.random.Generator) -> OutcomeQuadruple:
    return OutcomeQuadruple(*(int(x[0]) for x in signcos_outcomes(q, _rng_uniforms(rng))))


def sample_sequential_cmr(q: Quadruplet, shared_noise: bool, rng: np.random.Generator) -> OutcomeQuadruple:
    return OutcomeQuadruple(*(int(x[0]) for x in sequential_outcomes(q, _rng_uniforms(rng), shared_noise)))


def qm_joint_probability(a: int, b: int, theta_a: float, theta_b: float) -> float:
    return (1.0 - a * b * math.cos(theta_a - theta_b)) / 4.0


def run_trials(spec: ModelSpec, q: Quadruplet, seed: int, start: int, stop: int) -> dict[str, np.ndarray]:
    """Outcome streams of trials ``start..stop-1``."""
    return outcomes(spec, q, trial_uniforms(seed, start, stop))


_PAIRS = {
    "ab": ("a", "b"),
    "a_prime_b_prime": ("a_prime", "b_prime"),
    "aa_prime": ("a", "a_prime"),
    "bb_prime": ("b", "b_prime"),
    "ab_prime": ("a", "b_prime"),
    "a_prime_b": ("a_prime", "b"),
}


def _shard_sums(spec, q, seed, start, stop):
    out = run_trials(spec, q, seed, start, stop)
    sums = {}
    for slot, (x, y) in _PAIRS.items():
        if x in out and y in out:
            prod = out[x].astype(np.int64) * out[y]
            sums[slot] = (int(prod.sum()), int((prod * prod).sum()), len(prod))
    return sums


def monte_carlo_correlations(spec: ModelSpec, q: Quadruplet, n: int, seed: int,
                             workers: int = 1, shard_size: int = DEFAULT_SHARD) -> CorrelationSet:
    """Empirical correlations for every slot the model can fill.

    Shards contribute (sum, sum of squares, count) integer triples, so the
    result is bit-identical for any ``workers``.
    """
    if n < 1:
        raise PreconditionError("n must be at least 1")
    bounds = [(s, min(s + shard_size, n)) for s in range(0, n, shard_size)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _shard_sums(spec, q, seed, *b), bounds))
    else:
        parts = [_shard_sums(spec, q, seed, *b) for b in bounds]
    totals: dict[str, list[int]] = {}
    for part in parts:
        for slot, triple in part.items():
            acc = totals.setdefault(slot, [0, 0, 0])
            for i in range(3):
                acc[i] += triple[i]
    return CorrelationSet(**{slot: correlation_from_sums(*t) for slot, t in totals.items()})
