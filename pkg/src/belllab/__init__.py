"""Numerical laboratory for Bell, CHSH and Boole inequalities on EPRB spin pairs."""

from .core import (
    Correlation,
    CorrelationSet,
    FamilyPoint,
    Provenance,
    Quadruplet,
    angular_distance,
    empirical_correlation,
    family_point_to_quadruplet,
    linear_correlation,
    local_same_side_correlation,
    normalize_angle,
    qm_cross_correlation,
    quadruplet_to_family_point,
)
from .inequalities import (
    InequalityFamily,
    InequalityReport,
    SignVariant,
    SimpleFactOutcome,
    bell0,
    boole,
    chsh,
    chsh0,
    simple_fact,
)
from .models import ModelKind, ModelSpec, monte_carlo_correlations, parse_model_clause

__version__ = "0.1.0"
