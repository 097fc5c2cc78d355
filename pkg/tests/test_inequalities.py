import itertools
import math

import pytest
from hypothesis import given, strategies as st

from belllab.core import Correlation, CorrelationSet, Provenance
from belllab.errors import DomainError, IncompleteInputError, PreconditionError
from belllab.inequalities import (
    InequalityFamily,
    SignVariant,
    SimpleFactOutcome,
    bell0,
    boole,
    chsh,
    chsh0,
    simple_fact,
    simple_fact_lhs,
)

R2 = math.sqrt(2.0)
unit = st.floats(-1.0, 1.0, allow_nan=False)
open_unit = st.floats(-1.0, 1.0, exclude_min=True, exclude_max=True, allow_nan=False)


def test_chsh0_examples():
    r = chsh0(1, 1, 1, -1, SignVariant.PLUS)
    assert r.lhs == 4 and r.violated and r.margin == 2
    r = chsh0(-1, -1, -1, -1, SignVariant.PLUS)
    assert r.lhs == 2 and not r.violated
    r = chsh0(R2 / 2, 1, 0, -R2 / 2, SignVariant.PLUS)
    assert r.lhs == pytest.approx(1 + R2, abs=1e-12) and r.violated


def test_chsh0_domain():
    with pytest.raises(DomainError):
        chsh0(1.2, 0, 0, 0)


def test_bell0_examples():
    assert not bell0(1, 0, 0).violated and bell0(1, 0, 0).lhs == 1
    phi = math.pi / 4
    # v, x, y at 0, pi/2, pi/4: <vx> from the local cos law, <yv>, <yx> from the singlet law
    r = bell0(math.cos(2 * phi), -math.cos(phi), -math.cos(3 * phi))
    assert r.lhs == pytest.approx(R2, abs=1e-12) and r.violated
    r = bell0(-1, 0.5, 0.5)
    assert r.lhs == -1 and not r.violated


def test_chsh_quantum_optimal_angles():
    ta, tap, tb, tbp = 0.0, math.pi / 2, math.pi / 4, -math.pi / 4
    cs = CorrelationSet.from_values(
        provenance=Provenance.QM_EXACT,
        ab=-math.cos(ta - tb), ab_prime=-math.cos(ta - tbp),
        a_prime_b=-math.cos(tap - tb), a_prime_b_prime=-math.cos(tap - tbp))
    lhs = sorted(r.lhs for r in chsh(cs))
    assert lhs[1] == pytest.approx(2 * R2, abs=1e-12)


def test_chsh_other_examples():
    zero = CorrelationSet.from_values(ab=0, ab_prime=0, a_prime_b=0, a_prime_b_prime=0)
    assert [r.lhs for r in chsh(zero)] == [0, 0]
    cs = CorrelationSet.from_values(ab=1, ab_prime=1, a_prime_b=1, a_prime_b_prime=-1)
    plus, _ = chsh(cs)
    assert plus.variant is SignVariant.PLUS and plus.lhs == 4


def test_chsh_missing_slot():
    with pytest.raises(IncompleteInputError) as info:
        chsh(CorrelationSet.from_values(ab=0, ab_prime=0, a_prime_b=0))
    assert info.value.slot == "a_prime_b_prime"


def test_boole_examples():
    plus, _ = boole(CorrelationSet.from_values(ab=R2 / 2, aa_prime=1, bb_prime=0, a_prime_b_prime=R2 / 2))
    assert plus.lhs == pytest.approx(1 + R2) and plus.violated
    plus, minus = boole(CorrelationSet.from_values(ab=1, aa_prime=1, bb_prime=1, a_prime_b_prime=1))
    # |1 - 1| + |1 + 1| = 2: both variants sit on the bound
    assert plus.lhs == 2 and not plus.violated and minus.lhs == 2 and not minus.violated
    eps = 0.05
    plus, _ = boole(CorrelationSet.from_values(ab=1 - eps ** 2 / 2, aa_prime=3 * eps, bb_prime=0,
                                               a_prime_b_prime=1 - eps ** 2 / 2))
    assert plus.lhs == pytest.approx(2.1475, abs=1e-12) and plus.violated


def test_boole_missing_slot():
    with pytest.raises(IncompleteInputError):
        boole(CorrelationSet.from_values(ab=0, aa_prime=0, bb_prime=0))


def test_empirical_inputs_get_statistical_tolerance():
    c = Correlation(0.5, Provenance.EMPIRICAL, stderr=0.01)
    cs = CorrelationSet(ab=c, aa_prime=c, bb_prime=c, a_prime_b_prime=c)
    plus, _ = boole(cs)
    assert plus.tolerance == pytest.approx(3 * 0.02)
    analytic = CorrelationSet.from_values(ab=0.5, aa_prime=0.5, bb_prime=0.5, a_prime_b_prime=0.5)
    assert boole(analytic)[0].tolerance == 0.0


@pytest.mark.parametrize(
    "alpha, beta, expected",
    [(0.5, -0.5, SimpleFactOutcome.PLUS_VIOLATED), (0.3, 0.3, SimpleFactOutcome.NEITHER),
     (-0.2, 0.1, SimpleFactOutcome.MINUS_VIOLATED)],
)
def test_simple_fact_examples(alpha, beta, expected):
    assert simple_fact(alpha, beta) is expected


@pytest.mark.parametrize("alpha, beta", [(1.0, 0.0), (0.0, -1.0), (2.0, 0.5)])
def test_simple_fact_precondition(alpha, beta):
    with pytest.raises(PreconditionError):
        simple_fact(alpha, beta)


@given(open_unit, open_unit)
def test_simple_fact_dichotomy(alpha, beta):
    out = simple_fact(alpha, beta)
    plus, minus = simple_fact_lhs(alpha, beta)
    assert plus + minus == pytest.approx(4.0, abs=1e-12)
    if alpha == beta:
        assert out is SimpleFactOutcome.NEITHER
    else:
        assert out is not SimpleFactOutcome.NEITHER
        if abs(alpha - beta) > 1e-12:
            assert (plus > 2) != (minus > 2)
            assert (plus > 2) == (out is SimpleFactOutcome.PLUS_VIOLATED)


def test_per_trial_identity_all_signs():
    for u, v, x, y in itertools.product((1, -1), repeat=4):
        assert abs(u * v + u * x) + abs(y * v - y * x) == 2


@given(unit, unit, unit)
def test_bell0_is_chsh0_with_u_equal_v(c_vx, c_yv, c_yx):
    reduced = chsh0(1.0, c_vx, c_yv, c_yx, SignVariant.PLUS)
    b = bell0(c_vx, c_yv, c_yx)
    assert reduced.lhs == pytest.approx(b.lhs + 1.0, abs=1e-12)
    assert reduced.violated == b.violated or abs(b.margin) < 1e-12


@given(unit, unit, unit, unit, unit, unit)
def test_chsh_relabeling_swaps_variants(ab, abp, apb, apbp, aap, bbp):
    # a <-> a' together with b <-> b'
    cs = CorrelationSet.from_values(ab=ab, ab_prime=abp, a_prime_b=apb, a_prime_b_prime=apbp)
    swapped = CorrelationSet.from_values(ab=apbp, ab_prime=apb, a_prime_b=abp, a_prime_b_prime=ab)
    plus, minus = chsh(cs)
    s_plus, s_minus = chsh(swapped)
    assert plus.lhs == pytest.approx(s_minus.lhs, abs=1e-12)
    assert minus.lhs == pytest.approx(s_plus.lhs, abs=1e-12)


@given(unit, unit, unit, unit)
def test_boole_relabeling_swaps_variants(ab, aap, bbp, apbp):
    # a <-> b' together with b <-> a' maps (ab, aa', bb', a'b') to (a'b', bb', aa', ab)
    cs = CorrelationSet.from_values(ab=ab, aa_prime=aap, bb_prime=bbp, a_prime_b_prime=apbp)
    swapped = CorrelationSet.from_values(ab=apbp, aa_prime=bbp, bb_prime=aap, a_prime_b_prime=ab)
    plus, minus = boole(cs)
    s_plus, s_minus = boole(swapped)
    assert plus.lhs == pytest.approx(s_minus.lhs, abs=1e-12)
    assert minus.lhs == pytest.approx(s_plus.lhs, abs=1e-12)


def test_boole_not_invariant_under_primed_swap():
    # a <-> a', b <-> b' is a symmetry of CHSH but not of Boole
    cs = CorrelationSet.from_values(ab=0, aa_prime=0, bb_prime=1, a_prime_b_prime=1)
    swapped = CorrelationSet.from_values(ab=1, aa_prime=0, bb_prime=1, a_prime_b_prime=0)
    assert sorted(r.lhs for r in boole(cs)) != sorted(r.lhs for r in boole(swapped))


def test_report_invariants():
    r = chsh0(0.9, 0.9, 0.9, -0.9)
    assert r.violated == (r.margin > 0)
    assert r.family is InequalityFamily.CHSH0 and r.bound == 2
