"""Evaluation of the CHSH-type inequality families and the sign dichotomy.

Every evaluator returns an :class:`InequalityReport` carrying the left-hand
side, the bound and the margin ``lhs - bound``, so callers can reason about
how far a configuration is from the boundary and not only whether it
crosses it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .core import Correlation, CorrelationSet
from .errors import DomainError, PreconditionError


class InequalityFamily(enum.Enum):
    CHSH0 = "chsh0"
    BELL0 = "bell0"
    CHSH = "chsh"
    BOOLE = "boole"


class SignVariant(enum.Enum):
    PLUS = "plus"    # upper signs
    MINUS = "minus"  # lower signs


class SimpleFactOutcome(enum.Enum):
    PLUS_VIOLATED = "plus_violated"
    MINUS_VIOLATED = "minus_violated"
    NEITHER = "neither"


BOUNDS = {
    InequalityFamily.CHSH0: 2.0,
    InequalityFamily.BELL0: 1.0,
    InequalityFamily.CHSH: 2.0,
    InequalityFamily.BOOLE: 2.0,
}


@dataclass(frozen=True)
class InequalityReport:
    family: InequalityFamily
    variant: SignVariant
    lhs: float
    bound: float
    margin: float
    violated: bool
    inputs: tuple[float, ...]
    tolerance: float = 0.0

    def as_dict(self) -> dict:
        return {
            "family": self.family.value,
            "variant": self.variant.value,
            "lhs": self.lhs,
            "bound": self.bound,
            "margin": self.margin,
            "violated": self.violated,
            "tolerance": self.tolerance,
            "inputs": list(self.inputs),
        }


def _report(family, variant, lhs, inputs, tolerance):
    bound = BOUNDS[family]
    margin = lhs - bound
    return InequalityReport(family, variant, lhs, bound, margin, margin > tolerance, tuple(inputs), tolerance)


def _check_unit(*values: float) -> None:
    for v in values:
        if not (math.isfinite(v) and -1.0 <= v <= 1.0):
            raise DomainError(f"correlation {v!r} outside [-1, 1]")


def chsh0(c_uv: float, c_ux: float, c_yv: float, c_yx: float,
          variant: SignVariant = SignVariant.PLUS, tolerance: float = 0.0,
          family: InequalityFamily = InequalityFamily.CHSH0) -> InequalityReport:
    """|<uv> +- <ux>| + |<yv> -+ <yx>| <= 2 for any four +-1 sequences."""
    _check_unit(c_uv, c_ux, c_yv, c_yx)
    if variant is SignVariant.PLUS:
        lhs = abs(c_uv + c_ux) + abs(c_yv - c_yx)
    else:
        lhs = abs(c_uv - c_ux) + abs(c_yv + c_yx)
    return _report(family, variant, lhs, (c_uv, c_ux, c_yv, c_yx), tolerance)


def bell0(c_vx: float, c_yv: float, c_yx: float, tolerance: float = 0.0) -> InequalityReport:
    """Three-correlation form <vx> + |<yv> - <yx>| <= 1.

    This is :func:`chsh0` with u = v, so the left-hand side can be negative.
    """
    _check_unit(c_vx, c_yv, c_yx)
    lhs = c_vx + abs(c_yv - c_yx)
    return _report(InequalityFamily.BELL0, SignVariant.PLUS, lhs, (c_vx, c_yv, c_yx), tolerance)


def propagated_tolerance(correlations: tuple[Correlation, ...], k: float = 3.0) -> float:
    """k times the standard error of the left-hand side.

    The left-hand side is 1-Lipschitz in each argument, so independent
    standard errors add in quadrature.  Analytic inputs contribute zero.
    """
    var = sum((c.stderr or 0.0) ** 2 for c in correlations)
    return k * math.sqrt(var)


def _pair(family, slots, cs, tolerance):
    cors = cs.require(*slots)
    if tolerance is None:
        tolerance = propagated_tolerance(cors)
    vals = [c.value for c in cors]
    return (
        chsh0(*vals, SignVariant.PLUS, tolerance, family),
        chsh0(*vals, SignVariant.MINUS, tolerance, family),
    )


def chsh(cs: CorrelationSet, tolerance: Optional[float] = None) -> tuple[InequalityReport, InequalityReport]:
    """Both sign variants of |<ab> +- <ab'>| + |<a'b> -+ <a'b'>| <= 2.

    With ``tolerance=None`` the tolerance is 0 for analytic inputs and three
    propagated standard errors for empirical ones.
    """
    return _pair(InequalityFamily.CHSH, ("ab", "ab_prime", "a_prime_b", "a_prime_b_prime"), cs, tolerance)


def boole(cs: CorrelationSet, tolerance: Optional[float] = None) -> tuple[InequalityReport, InequalityReport]:
    """Both sign variants of |<ab> +- <aa'>| + |<b'b> -+ <b'a'>| <= 2."""
    return _pair(InequalityFamily.BOOLE, ("ab", "aa_prime", "bb_prime", "a_prime_b_prime"), cs, tolerance)


def simple_fact_lhs(alpha: float, beta: float) -> tuple[float, float]:
    """Left-hand sides of |1 + alpha| + |1 - beta| and |1 - alpha| + |1 + beta|."""
    return abs(1.0 + alpha) + abs(1.0 - beta), abs(1.0 - alpha) + abs(1.0 + beta)


def simple_fact(alpha: float, beta: float) -> SimpleFactOutcome:
    """Which of the two inequalities |1 +- alpha| + |1 -+ beta| <= 2 fails.

    Inside the open unit square the two left-hand sides are ``2 + (alpha - beta)``
    and ``2 - (alpha - beta)``, so the verdict is decided by comparing alpha
    with beta directly; this stays exact where the rounded sums would tie.
    """
    if not (abs(alpha) < 1.0 and abs(beta) < 1.0):
        raise PreconditionError(f"need |alpha| < 1 and |beta| < 1, got ({alpha}, {beta})")
    if alpha > beta:
        return SimpleFactOutcome.PLUS_VIOLATED
    if alpha < beta:
        return SimpleFactOutcome.MINUS_VIOLATED
    return SimpleFactOutcome.NEITHER
