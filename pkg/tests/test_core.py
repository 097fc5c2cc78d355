import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from belllab.core import (
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
from belllab.errors import DomainError, IncompleteInputError, UsageError

PI = math.pi
angles = st.floats(-50.0, 50.0, allow_nan=False)


@pytest.mark.parametrize("raw, expected", [(3 * PI, -PI), (0.0, 0.0), (-5 * PI / 2, -PI / 2), (PI, -PI)])
def test_normalize_examples(raw, expected):
    assert normalize_angle(raw) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_normalize_rejects_non_finite(bad):
    with pytest.raises(DomainError):
        normalize_angle(bad)


@given(angles)
def test_normalize_range_and_idempotent(x):
    y = normalize_angle(x)
    assert -PI <= y < PI
    assert normalize_angle(y) == y
    k = (x - y) / (2 * PI)
    assert abs(k - round(k)) < 1e-9


@given(angles, angles)
def test_distance_symmetric_and_bounded(x, y):
    d = angular_distance(x, y)
    assert 0.0 <= d <= PI
    assert d == angular_distance(y, x)


@pytest.mark.parametrize("t1, t2, expected", [(0, PI, 1.0), (0, 0, -1.0), (0, PI / 2, 0.0)])
def test_qm_cross_examples(t1, t2, expected):
    c = qm_cross_correlation(t1, t2)
    assert c.value == pytest.approx(expected, abs=1e-15)
    assert c.provenance is Provenance.QM_EXACT


def test_counterfactual_pair_is_tagged():
    assert qm_cross_correlation(0.1, 0.2, counterfactual=True).provenance is Provenance.CMR_DERIVED


@given(angles, angles, st.integers(-5, 5))
def test_qm_cross_symmetry_and_periodicity(x, y, k):
    c = qm_cross_correlation(x, y).value
    assert c == pytest.approx(qm_cross_correlation(y, x).value, abs=1e-12)
    assert c == pytest.approx(qm_cross_correlation(x + 2 * PI * k, y).value, abs=1e-9)


@given(angles, angles)
def test_sign_flip_covariance(x, y):
    assert qm_cross_correlation(x + PI, y).value == pytest.approx(-qm_cross_correlation(x, y).value, abs=1e-9)


@pytest.mark.parametrize("t, tp, expected", [(0, 0, 1.0), (0, PI, -1.0), (0, PI / 3, 0.5)])
def test_local_same_side_examples(t, tp, expected):
    c = local_same_side_correlation(t, tp)
    assert c.value == pytest.approx(expected, abs=1e-15)
    assert c.assumes_locality


@pytest.mark.parametrize("t, tp, expected", [(0, 0, 1.0), (0, PI / 2, 0.0), (0, PI, -1.0)])
def test_linear_examples(t, tp, expected):
    assert linear_correlation(t, tp).value == pytest.approx(expected, abs=1e-15)


def test_linear_and_cos_laws_meet_only_at_special_distances():
    for d in (0.0, PI / 2, PI):
        assert linear_correlation(0, d).value == pytest.approx(local_same_side_correlation(0, d).value, abs=1e-15)
    for d in np.linspace(0, PI, 1001)[1:-1]:
        if abs(d - PI / 2) > 1e-9:
            assert abs(linear_correlation(0, d).value - local_same_side_correlation(0, d).value) > 1e-6


@pytest.mark.parametrize(
    "p, expected",
    [
        ((PI / 4, -3 * PI / 4), (PI / 4, -3 * PI / 4, -PI / 4, 3 * PI / 4)),
        ((0.0, 0.0), (0.0, 0.0, 0.0, 0.0)),
        ((PI / 2, -PI / 2), (PI / 2, -PI / 2, -PI / 2, PI / 2)),
    ],
)
def test_family_point_examples(p, expected):
    q = family_point_to_quadruplet(FamilyPoint(*p))
    assert q.as_tuple() == pytest.approx(expected, abs=1e-15)
    assert qm_cross_correlation(q.theta_a, q.theta_b).value == pytest.approx(
        qm_cross_correlation(q.theta_a_prime, q.theta_b_prime).value, abs=1e-15)


@given(st.floats(0, PI), st.floats(-PI, 0))
def test_family_round_trip(ta, tb):
    p = FamilyPoint(ta, tb)
    back = quadruplet_to_family_point(family_point_to_quadruplet(p))
    assert (back.theta_a, back.theta_b) == (p.theta_a, p.theta_b)


def test_antiparallel_subfamily():
    assert FamilyPoint(PI / 4, -3 * PI / 4).in_antiparallel_subfamily
    assert not FamilyPoint(PI / 4, -PI / 4).in_antiparallel_subfamily


def test_family_point_domain():
    with pytest.raises(DomainError):
        FamilyPoint(-0.5, -1.0)
    with pytest.raises(DomainError):
        FamilyPoint(0.5, 1.0)


def test_quadruplet_normalizes():
    q = Quadruplet(3 * PI, 0, 0, 0)
    assert q.theta_a == -PI


def test_correlation_validation():
    with pytest.raises(DomainError):
        Correlation(1.5, Provenance.MODEL)
    with pytest.raises(DomainError):
        Correlation(0.5, Provenance.EMPIRICAL)
    with pytest.raises(DomainError):
        Correlation(0.5, Provenance.MODEL, stderr=0.1)


def test_correlation_set_require_names_slot():
    cs = CorrelationSet.from_values(ab=0.1)
    with pytest.raises(IncompleteInputError) as info:
        cs.require("ab", "aa_prime")
    assert info.value.slot == "aa_prime"


@pytest.mark.parametrize(
    "s1, s2, expected",
    [([1, 1, -1], [1, 1, -1], 1.0), ([1, -1], [-1, 1], -1.0), ([1, 1, 1, 1], [1, -1, 1, -1], 0.0)],
)
def test_empirical_examples(s1, s2, expected):
    c = empirical_correlation(s1, s2)
    assert c.value == expected
    assert c.provenance is Provenance.EMPIRICAL


def test_empirical_stderr_is_sample_std_over_root_n():
    s1 = np.array([1, 1, 1, 1])
    s2 = np.array([1, -1, 1, -1])
    c = empirical_correlation(s1, s2)
    assert c.stderr == pytest.approx(np.std(s1 * s2, ddof=1) / 2.0)


def test_empirical_errors():
    with pytest.raises(UsageError):
        empirical_correlation([], [])
    with pytest.raises(UsageError):
        empirical_correlation([1, 1], [1])
    with pytest.raises(DomainError):
        empirical_correlation([1, 0], [1, 1])


@given(st.lists(st.sampled_from([-1, 1]), min_size=1, max_size=50), st.data())
def test_empirical_bounds_and_extremes(s1, data):
    s2 = data.draw(st.lists(st.sampled_from([-1, 1]), min_size=len(s1), max_size=len(s1)))
    v = empirical_correlation(s1, s2).value
    assert -1.0 <= v <= 1.0
    assert (v == 1.0) == (s1 == s2)
    assert (v == -1.0) == (s1 == [-x for x in s2])
