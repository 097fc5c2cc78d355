"""Classical and quantum extremes of the two-setting functionals.

The classical side is settled by brute force over the 16 deterministic
assignments (the local polytope's vertices); the quantum side by a
coarse-to-fine grid scan over measurement angles.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import Quadruplet
from .errors import PreconditionError, UsageError
from .inequalities import InequalityFamily, SignVariant

LABELS = ("a", "a_prime", "b", "b_prime")


class DeterministicStrategy(NamedTuple):
    a: int
    a_prime: int
    b: int
    b_prime: int

    def correlations(self) -> dict[str, int]:
        return {
            "ab": self.a * self.b,
            "aa_prime": self.a * self.a_prime,
            "bb_prime": self.b * self.b_prime,
            "a_prime_b_prime": self.a_prime * self.b_prime,
            "ab_prime": self.a * self.b_prime,
            "a_prime_b": self.a_prime * self.b,
        }


def enumerate_strategies() -> list[DeterministicStrategy]:
    """All 16 sign assignments, starting from (+1, +1, +1, +1)."""
    return [DeterministicStrategy(*s) for s in itertools.product((1, -1), repeat=4)]


def _chsh0_int(c_uv, c_ux, c_yv, c_yx, variant):
    if variant is SignVariant.PLUS:
        return abs(c_uv + c_ux) + abs(c_yv - c_yx)
    return abs(c_uv - c_ux) + abs(c_yv + c_yx)


def strategy_value(s: DeterministicStrategy, family: InequalityFamily,
                   variant: Optional[SignVariant] = SignVariant.PLUS) -> int:
    """Left-hand side of ``family`` on one vertex, maximized over role choices for CHSH0/BELL0."""
    c = s.correlations()
    v = s._asdict()
    if family is InequalityFamily.CHSH:
        return _chsh0_int(c["ab"], c["ab_prime"], c["a_prime_b"], c["a_prime_b_prime"], variant)
    if family is InequalityFamily.BOOLE:
        return _chsh0_int(c["ab"], c["aa_prime"], c["bb_prime"], c["a_prime_b_prime"], variant)
    if family is InequalityFamily.CHSH0:
        return max(
            _chsh0_int(v[u] * v[p], v[u] * v[x], v[y] * v[p], v[y] * v[x], variant)
            for u, p, x, y in itertools.product(LABELS, repeat=4)
        )
    if family is InequalityFamily.BELL0:
        return max(
            v[p] * v[x] + abs(v[y] * v[p] - v[y] * v[x])
            for p, x, y in itertools.product(LABELS, repeat=3)
        )
    raise UsageError(f"unknown family {family!r}")


def classical_max(family: InequalityFamily, variant: Optional[SignVariant] = SignVariant.PLUS) -> int:
    """Maximum over deterministic strategies; linearity makes it the maximum over all mixtures.

    BELL0 has no sign variant and ``variant`` is ignored for it.
    """
    if family is not InequalityFamily.BELL0 and variant is None:
        raise UsageError(f"{family.value} needs a sign variant")
    return max(strategy_value(s, family, variant) for s in enumerate_strategies())


@dataclass(frozen=True)
class ScanResult:
    best_value: float
    best_config: Quadruplet
    evaluations: int


def quantum_objective(family: InequalityFamily, theta_a, theta_a_prime, theta_b, theta_b_prime):
    """Larger of the two sign variants, vectorized over angle arrays.

    CHSH uses the singlet law for all four cross pairs; BOOLE additionally
    takes the same-side pairs from the Locality-based ``cos`` law.
    """
    ab = -np.cos(theta_a - theta_b)
    apbp = -np.cos(theta_a_prime - theta_b_prime)
    if family is InequalityFamily.CHSH:
        x = -np.cos(theta_a - theta_b_prime)
        y = -np.cos(theta_a_prime - theta_b)
    elif family is InequalityFamily.BOOLE:
        x = np.cos(theta_a - theta_a_prime)
        y = np.cos(theta_b - theta_b_prime)
    else:
        raise UsageError(f"quantum scan supports CHSH and BOOLE, not {family.value}")
    plus = np.abs(ab + x) + np.abs(y - apbp)
    minus = np.abs(ab - x) + np.abs(y + apbp)
    return np.maximum(plus, minus)


def _best_on_grid(family, axes, workers):
    """Argmax over the product grid of three axes, split along the first axis.

    Ties go to the smallest flat index so the answer does not depend on how
    the grid is partitioned.
    """
    a1, a2, a3 = axes
    n1 = len(a1)
    chunks = [c for c in np.array_split(np.arange(n1), max(1, min(workers, n1))) if len(c)]

    def work(idx):
        g1, g2, g3 = np.meshgrid(a1[idx], a2, a3, indexing="ij")
        vals = quantum_objective(family, 0.0, g1, g2, g3)
        k = int(np.argmax(vals))
        i, j, l = np.unravel_index(k, vals.shape)
        flat = (int(idx[i]) * len(a2) + int(j)) * len(a3) + int(l)
        return float(vals[i, j, l]), flat

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, chunks))
    else:
        results = [work(c) for c in chunks]
    value, flat = max(results, key=lambda r: (r[0], -r[1]))
    i, rest = divmod(flat, len(a2) * len(a3))
    j, l = divmod(rest, len(a3))
    return value, (float(a1[i]), float(a2[j]), float(a3[l])), n1 * len(a2) * len(a3)


def quantum_max_scan(family: InequalityFamily, resolution: float, workers: int = 1,
                     coarse_points: int = 64) -> ScanResult:
    """Maximize the quantum left-hand side over angles with theta_a fixed to 0.

    A uniform grid of ``coarse_points`` per free angle is refined around the
    incumbent by factors of ten until the step is at most ``resolution``.
    """
    if not resolution > 0:
        raise PreconditionError("resolution must be positive")
    step = 2.0 * math.pi / coarse_points
    axis = np.arange(coarse_points) * step
    value, best, evals = _best_on_grid(family, (axis, axis, axis), workers)
    offsets = np.arange(-10, 11)
    while step > resolution:
        fine = step / 10.0
        axes = tuple(c + offsets * fine for c in best)
        value, best, n = _best_on_grid(family, axes, workers)
        evals += n
        step = fine
    ap, b, bp = best
    # theta_a = 0 gauge; the Quadruplet normalizes the rest
    return ScanResult(value, Quadruplet(0.0, b, ap, bp), evals)


def random_sequence_audit(n_trials: int, sequence_length: int, seed: int, batch: int = 5000) -> bool:
    """Check that no quadruple of random +-1 sequences violates any CHSH0 instance.

    Correlations are kept as integer sums (``sequence_length`` times the
    empirical value), so the comparison with the bound is exact.
    """
    if n_trials < 1 or sequence_length < 1:
        raise PreconditionError("counts must be positive")
    rng = np.random.default_rng(seed)
    roles = np.array(list(itertools.product(range(4), repeat=4)))
    u, v, x, y = roles.T
    limit = 2 * sequence_length
    done = 0
    while done < n_trials:
        m = min(batch, n_trials - done)
        seqs = rng.integers(0, 2, size=(m, 4, sequence_length), dtype=np.int8) * 2 - 1
        s = np.einsum("bil,bjl->bij", seqs.astype(np.int32), seqs.astype(np.int32))
        uv, ux, yv, yx = s[:, u, v], s[:, u, x], s[:, y, v], s[:, y, x]
        plus = np.abs(uv + ux) + np.abs(yv - yx)
        minus = np.abs(uv - ux) + np.abs(yv + yx)
        if (plus > limit).any() or (minus > limit).any():
            return False
        done += m
    return True
