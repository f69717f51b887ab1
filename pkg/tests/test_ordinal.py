# -*- coding: utf-8 -*-
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from engine.base_objective import Fill, SeparableConcave
from engine.errors import (ConvexityHypothesisFailed, DimensionMismatch, MalformedInput,
                           PmfNotNormalized, UnknownGamma, UnsupportedObjective)
from engine.instance import convexity_report
from engine.mechanism import CommonLottery, expand_common_lottery
from engine.ordinal import (OrdinalInstance, aggregate_per_gamma, baseline_instance, failing_gammas,
                            mixed_position_masses, normalize_gamma, optimal_common_lottery_ordinal,
                            ordinal_position_masses, uneven_convexity, uneven_multipliers,
                            verify_uneven_decomposition)
from engine.optimizer import optimal_lottery_fill
from engine.transform import multipliers
from tests.strategies import increasing_utilities, instances, lotteries, ordinal_instances

QUALITIES = ['0', '1/3', '2/3', '1']
QUARTER = ['1/4'] * 4


def _ordinal(gammas, utilities):
    weight = Fraction(1, len(gammas))
    return OrdinalInstance(QUALITIES, QUARTER, gammas, [weight] * len(gammas), utilities,
                           QUARTER, 1)


@pytest.fixture
def convex_pair():
    return _ordinal(['lin', 'sq'], [QUALITIES, ['0', '1/9', '4/9', '1']])


@pytest.fixture
def with_steep():
    return _ordinal(['lin', 'steep'], [QUALITIES, ['0', '9/10', '19/20', '1']])


def test_normalized_view(convex_pair):
    view = normalize_gamma(convex_pair, 'sq')
    assert list(view.x) == [0, Fraction(1, 9), Fraction(4, 9), 1]
    assert list(view.F) == [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1]
    assert view.f == [Fraction(1, 4)] * 4
    with pytest.raises(UnknownGamma):
        normalize_gamma(convex_pair, 'cube')


def test_even_grid_reduces_to_baseline_convexity(convex_pair):
    uneven = uneven_convexity(normalize_gamma(convex_pair, 'lin')).second_differences
    even = convexity_report(baseline_instance(convex_pair)).second_differences
    assert list(uneven) == [v / 3 for v in even]
    assert list(uneven) == [Fraction(4, 9), Fraction(1, 9)]


def test_uneven_convexity_entries(convex_pair, with_steep):
    sq = uneven_convexity(normalize_gamma(convex_pair, 'sq'))
    assert sq.second_differences == (Fraction(16, 27), Fraction(7, 27))
    steep = uneven_convexity(normalize_gamma(with_steep, 'steep'))
    assert steep.second_differences[0] == Fraction(-1, 2)
    assert failing_gammas(with_steep) == ['steep']
    assert failing_gammas(convex_pair) == []


def test_even_grid_multipliers_scale_with_spacing(convex_pair):
    uneven = uneven_multipliers(normalize_gamma(convex_pair, 'lin'))
    baseline = multipliers(baseline_instance(convex_pair))
    assert list(uneven.local_up) == [3 * v for v in baseline.local_up]
    assert uneven.value(2, 0) == 3 * baseline.value(2, 0)


def test_uneven_decomposition(convex_pair):
    inst = baseline_instance(convex_pair)
    mech = expand_common_lottery(inst, CommonLottery(QUARTER))
    report = verify_uneven_decomposition(normalize_gamma(convex_pair, 'sq'), mech)
    assert report.residual == 0
    assert report.p_theta0 == 1


def test_ordinal_optimum_matches_baseline(convex_pair):
    lottery = optimal_common_lottery_ordinal(convex_pair, Fill())
    assert list(lottery.c) == [0, Fraction(5, 12), Fraction(1, 3), Fraction(1, 4)]
    masses = ordinal_position_masses(convex_pair, lottery)
    assert list(masses.s) == [0, Fraction(5, 24), Fraction(1, 4), Fraction(1, 4)]


def test_failing_gamma_is_named(with_steep):
    with pytest.raises(ConvexityHypothesisFailed) as err:
        optimal_common_lottery_ordinal(with_steep, Fill())
    assert err.value.gammas == ['steep']


def test_ordinal_needs_a_linear_objective(convex_pair):
    with pytest.raises(UnsupportedObjective):
        optimal_common_lottery_ordinal(convex_pair, SeparableConcave(['1'] * 4, '1/2'))


def test_aggregation_is_linear(convex_pair):
    per_gamma = {'lin': CommonLottery(['0', '1/2', '1/4', '1/4']),
                 'sq': CommonLottery(['1/4', '1/4', '1/4', '1/4'])}
    mixed = aggregate_per_gamma(convex_pair, per_gamma)
    assert list(mixed.c) == [Fraction(1, 8), Fraction(3, 8), Fraction(1, 4), Fraction(1, 4)]
    assert mixed_position_masses(convex_pair, per_gamma) == ordinal_position_masses(convex_pair, mixed)


def test_aggregation_guards(convex_pair):
    with pytest.raises(UnknownGamma):
        aggregate_per_gamma(convex_pair, {'lin': CommonLottery(QUARTER), 'cube': CommonLottery(QUARTER)})
    with pytest.raises(DimensionMismatch):
        aggregate_per_gamma(convex_pair, {'lin': CommonLottery(QUARTER)})


def test_validation():
    with pytest.raises(MalformedInput):
        OrdinalInstance(['0', '2/3', '1/3', '1'], QUARTER, ['lin'], ['1'], [QUALITIES], QUARTER, 1)
    with pytest.raises(PmfNotNormalized):
        OrdinalInstance(QUALITIES, QUARTER, ['lin'], ['1/2'], [QUALITIES], QUARTER, 1)
    with pytest.raises(MalformedInput):
        OrdinalInstance(QUALITIES, QUARTER, ['lin'], ['1'], [['0', '1/2', '1/2', '1']], QUARTER, 1)


def test_dict_round_trip(convex_pair):
    data = convex_pair.to_dict()
    assert data['Gamma'] == ['lin', 'sq']
    assert OrdinalInstance.from_dict(data).to_dict() == data


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_mixing_lotteries_mixes_masses(data):
    oi = data.draw(ordinal_instances())
    per_gamma = {name: CommonLottery(data.draw(lotteries(oi.n))) for name in oi.gammas}
    mixed = aggregate_per_gamma(oi, per_gamma)
    assert mixed_position_masses(oi, per_gamma) == ordinal_position_masses(oi, mixed)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_monotone_rescaling_preserves_the_analysis(data):
    inst = data.draw(instances(max_n=6))
    utility = data.draw(increasing_utilities(inst.n))
    scale = Fraction(data.draw(st.integers(min_value=1, max_value=9)),
                     data.draw(st.integers(min_value=1, max_value=4)))
    shift = data.draw(st.integers(min_value=-5, max_value=5))
    pair = [OrdinalInstance(list(range(inst.n)), list(inst.f), ['u'], ['1'], [u], list(inst.g), inst.d)
            for u in (utility, [scale * v + shift for v in utility])]
    plain, rescaled = (uneven_convexity(normalize_gamma(oi, 'u')).second_differences for oi in pair)
    assert list(rescaled) == [scale * v for v in plain]
    assert failing_gammas(pair[0]) == failing_gammas(pair[1])
    if not failing_gammas(pair[0]):
        first, second = (optimal_common_lottery_ordinal(oi, Fill()) for oi in pair)
        assert list(first.c) == list(second.c)
        assert ordinal_position_masses(pair[0], first) == ordinal_position_masses(pair[1], second)


@settings(max_examples=100, deadline=None)
@given(instances(max_n=6, nonincreasing=True))
def test_single_linear_gamma_is_the_baseline(inst):
    qualities = [Fraction(k, inst.n - 1) for k in range(inst.n)]
    oi = OrdinalInstance(qualities, list(inst.f), ['lin'], ['1'], [qualities], list(inst.g), inst.d)
    assert failing_gammas(oi) == []
    lottery = optimal_common_lottery_ordinal(oi, Fill())
    assert list(lottery.c) == list(optimal_lottery_fill(inst).c)
