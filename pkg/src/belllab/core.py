"""Angles, measurement configurations and closed-form correlation laws.

All directions lie in one fixed plane and are represented by their angle
(radians) to a reference direction.  Angles are plain floats; the canonical
branch is [-pi, pi).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, IncompleteInputError, UsageError

Angle = float

TWO_PI = 2.0 * math.pi

# Absolute tolerance for "exact" angle relations such as membership of the
# anti-parallel subfamily.
ANGLE_TOL = 1e-12


def normalize_angle(raw: float) -> Angle:
    """Return the representative of ``raw`` in [-pi, pi).

    Values already in range are returned unchanged, which makes the map
    idempotent bit for bit.

    >>> normalize_angle(3 * math.pi)
    -3.141592653589793
    >>> normalize_angle(-5 * math.pi / 2)
    -1.5707963267948966
    """
    raw = float(raw)
    if not math.isfinite(raw):
        raise DomainError(f"angle must be finite, got {raw!r}")
    if -math.pi <= raw < math.pi:
        return raw
    out = (raw + math.pi) % TWO_PI - math.pi
    # float modulo can land on the excluded upper end
    if out >= math.pi:
        out -= TWO_PI
    return out


def angular_distance(theta: float, theta_prime: float) -> float:
    """Distance on the circle, in [0, pi] and exactly symmetric."""
    d = abs(float(theta) - float(theta_prime)) % TWO_PI
    if d > math.pi:
        d = TWO_PI - d
    return d


@dataclass(frozen=True)
class Quadruplet:
    """The four measurement directions (a, b, a', b') of a configuration."""

    theta_a: Angle
    theta_b: Angle
    theta_a_prime: Angle
    theta_b_prime: Angle

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, normalize_angle(getattr(self, f.name)))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.theta_a, self.theta_b, self.theta_a_prime, self.theta_b_prime)

    def replace(self, **changes: float) -> "Quadruplet":
        values = dict(zip(("theta_a", "theta_b", "theta_a_prime", "theta_b_prime"), self.as_tuple()))
        values.update(changes)
        return Quadruplet(**values)


@dataclass(frozen=True)
class FamilyPoint:
    """A point of the two-parameter family with a' = -a and b' = -b.

    The family is only needed on ``[0, pi] x [-pi, 0]``; the remaining
    quadrants follow from exchanging a with a' and/or b with b'.
    """

    theta_a: float
    theta_b: float

    def __post_init__(self):
        ta, tb = float(self.theta_a), float(self.theta_b)
        if not (math.isfinite(ta) and math.isfinite(tb)):
            raise DomainError("family point angles must be finite")
        if not (-ANGLE_TOL <= ta <= math.pi + ANGLE_TOL):
            raise DomainError(f"theta_a={ta} outside [0, pi]")
        if not (-math.pi - ANGLE_TOL <= tb <= ANGLE_TOL):
            raise DomainError(f"theta_b={tb} outside [-pi, 0]")
        object.__setattr__(self, "theta_a", ta)
        object.__setattr__(self, "theta_b", tb)

    @property
    def in_antiparallel_subfamily(self) -> bool:
        """True on the one-parameter slice where theta_a - theta_b = pi."""
        return abs(angular_distance(self.theta_a, self.theta_b) - math.pi) <= ANGLE_TOL


def family_point_to_quadruplet(p: FamilyPoint) -> Quadruplet:
    return Quadruplet(p.theta_a, p.theta_b, -p.theta_a, -p.theta_b)


def quadruplet_to_family_point(q: Quadruplet) -> FamilyPoint:
    """Inverse of :func:`family_point_to_quadruplet` on the family domain."""
    if angular_distance(q.theta_a_prime, -q.theta_a) > ANGLE_TOL or angular_distance(
        q.theta_b_prime, -q.theta_b
    ) > ANGLE_TOL:
        raise DomainError("quadruplet does not satisfy a' = -a and b' = -b")
    ta = q.theta_a
    if ta < 0.0:
        # -pi is the canonical image of the family edge theta_a = pi
        if ta != -math.pi:
            raise DomainError(f"theta_a={ta} has no preimage in [0, pi]")
        ta = math.pi
    if q.theta_b > 0.0:
        raise DomainError(f"theta_b={q.theta_b} has no preimage in [-pi, 0]")
    return FamilyPoint(ta, q.theta_b)


class Provenance(enum.Enum):
    QM_EXACT = "qm-exact"
    CMR_DERIVED = "cmr-derived"
    MODEL = "model"
    EMPIRICAL = "empirical"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Correlation:
    """A correlation value together with where it came from.

    ``assumes_locality`` marks values that are only available once Locality
    is granted, such as same-side correlations computed from geometry.
    """

    value: float
    provenance: Provenance
    stderr: Optional[float] = None
    assumes_locality: bool = False

    def __post_init__(self):
        v = float(self.value)
        if not (math.isfinite(v) and -1.0 <= v <= 1.0):
            raise DomainError(f"correlation {v!r} outside [-1, 1]")
        object.__setattr__(self, "value", v)
        if (self.stderr is not None) != (self.provenance is Provenance.EMPIRICAL):
            raise DomainError("stderr must be given exactly for empirical correlations")
        if self.stderr is not None:
            se = float(self.stderr)
            if not (math.isfinite(se) and se >= 0.0):
                raise DomainError(f"stderr must be a non-negative real, got {se!r}")
            object.__setattr__(self, "stderr", se)


SLOTS = ("ab", "a_prime_b_prime", "aa_prime", "bb_prime", "ab_prime", "a_prime_b")


@dataclass(frozen=True)
class CorrelationSet:
    """The six pairwise correlations among a, b, a', b'; any may be unknown."""

    ab: Optional[Correlation] = None
    a_prime_b_prime: Optional[Correlation] = None
    aa_prime: Optional[Correlation] = None
    bb_prime: Optional[Correlation] = None
    ab_prime: Optional[Correlation] = None
    a_prime_b: Optional[Correlation] = None

    @classmethod
    def from_values(cls, provenance: Provenance = Provenance.MODEL, **values: float) -> "CorrelationSet":
        unknown = set(values) - set(SLOTS)
        if unknown:
            raise UsageError(f"unknown correlation slots: {sorted(unknown)}")
        return cls(**{k: Correlation(v, provenance) for k, v in values.items()})

    def require(self, *slots: str) -> tuple[Correlation, ...]:
        out = []
        for s in slots:
            c = getattr(self, s)
            if c is None:
                raise IncompleteInputError(s)
            out.append(c)
        return tuple(out)

    def present(self) -> dict[str, Correlation]:
        return {s: getattr(self, s) for s in SLOTS if getattr(self, s) is not None}


def qm_cross_correlation(theta_1: float, theta_2: float, counterfactual: bool = False) -> Correlation:
    """Singlet correlation between opposite-side readings, ``-cos(theta_1 - theta_2)``.

    For the measured pair (a, b) the value is a direct quantum prediction; for
    the unmeasured pair (a', b') it follows only once realism is granted, and
    ``counterfactual=True`` tags it accordingly.
    """
    prov = Provenance.CMR_DERIVED if counterfactual else Provenance.QM_EXACT
    return Correlation(-math.cos(float(theta_1) - float(theta_2)), prov)


def local_same_side_correlation(theta: float, theta_prime: float) -> Correlation:
    """Same-side correlation ``cos(theta - theta')``; only valid under Locality."""
    return Correlation(math.cos(float(theta) - float(theta_prime)), Provenance.MODEL, assumes_locality=True)


def linear_correlation(theta: float, theta_prime: float) -> Correlation:
    """Same-side correlation ``1 - 2 dist / pi`` of the sign-cos hidden variable model."""
    d = angular_distance(theta, theta_prime)
    return Correlation(1.0 - 2.0 * d / math.pi, Provenance.MODEL)


def correlation_from_sums(total: int, total_sq: int, n: int) -> Correlation:
    """Empirical correlation from the sum and sum of squares of n products."""
    mean = total / n
    if n > 1:
        var = max(total_sq - total * total / n, 0.0) / (n - 1)
        se = math.sqrt(var / n)
    else:
        se = 0.0
    # guard the [-1, 1] check against division round-off
    mean = min(1.0, max(-1.0, mean))
    return Correlation(mean, Provenance.EMPIRICAL, stderr=se)


def empirical_correlation(seq_1: Sequence[int], seq_2: Sequence[int]) -> Correlation:
    """Sample mean of the elementwise products of two +-1 sequences."""
    s1 = np.asarray(seq_1)
    s2 = np.asarray(seq_2)
    if s1.ndim != 1 or s2.ndim != 1:
        raise UsageError("sequences must be one-dimensional")
    if len(s1) == 0 or len(s1) != len(s2):
        raise UsageError(f"sequences must be non-empty and of equal length, got {len(s1)} and {len(s2)}")
    for s in (s1, s2):
        if not np.all((s == 1) | (s == -1)):
            raise DomainError("sequence entries must be +1 or -1")
    prod = s1.astype(np.int64) * s2.astype(np.int64)
    total = int(prod.sum())
    return correlation_from_sums(total, len(prod), len(prod))
