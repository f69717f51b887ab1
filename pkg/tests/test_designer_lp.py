# -*- coding: utf-8 -*-
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from engine.base_objective import Fill, Linear, SeparableConcave
from engine.designer_lp import (build_designer_lp, build_min_mass_lp, dual_certificate,
                                solve_designer, solve_min_mass)
from engine.errors import MalformedInput, UnsupportedObjective
from engine.instance import Instance, convexity_report, fill_cost
from engine.lpsolve import simplex_solve
from engine.mechanism import (CommonLottery, expand_common_lottery, feasibility_report,
                              mechanism_value, mon_profile, position_masses)
from engine.optimizer import optimal_lottery_fill, optimal_masses
from engine.transform import to_common_lottery
from tests.conftest import load_fixture
from tests.strategies import instances, linear_objectives, lotteries

APPENDIX = load_fixture('appendixA1')


def test_fig1_designer_optimum(uniform4):
    mech, value = solve_designer(uniform4, Fill())
    assert value == Fraction(17, 24)
    assert feasibility_report(uniform4, mech).is_feasible


def test_fig4_designer_beats_common_lottery(fig4_instance):
    mech, value = solve_designer(fig4_instance, Fill())
    assert value == Fraction(2, 3)
    lottery = expand_common_lottery(fig4_instance, optimal_lottery_fill(fig4_instance))
    assert value > mechanism_value(fig4_instance, lottery, Fill())


@pytest.mark.parametrize('case', APPENDIX['cases'], ids=lambda c: c['epsilon'])
def test_appendix_designer_values(case):
    inst = Instance(APPENDIX['n'], case['f'], APPENDIX['g'], APPENDIX['D'])
    _, value = solve_designer(inst, Fill())
    assert value == Fraction(case['expected']['designer_lp'])


def test_designer_certificate(uniform4):
    lp = build_designer_lp(uniform4, Fill())
    solution = simplex_solve(lp)
    cert = dual_certificate(uniform4, lp, solution)
    assert cert.complementary_slackness_ok
    assert cert.strong_duality_ok
    assert cert.closed_form_valid
    assert all(v >= 0 for v in cert.pos)


def test_linear_weights_reach_the_lp(uniform4):
    _, value = solve_designer(uniform4, Linear(['0', '0', '0', '1']))
    assert value == Fraction(1, 4)


def test_concave_objective_is_rejected(uniform4):
    with pytest.raises(UnsupportedObjective):
        build_designer_lp(uniform4, SeparableConcave(['1'] * 4, '1/2'))


def test_min_mass_of_the_optimal_lottery(uniform4):
    result = solve_min_mass(uniform4, ['0', '5/24', '1/4', '1/4'])
    assert result.mass == 1
    assert position_masses(uniform4.with_mass(result.mass), result.mechanism).s[3] >= Fraction(1, 4)
    cert = dual_certificate(uniform4, result.lp, result.solution)
    assert cert.complementary_slackness_ok
    assert cert.strong_duality_ok
    assert cert.value_matches_closed_form


def test_min_mass_of_zero_targets(uniform4):
    result = solve_min_mass(uniform4, ['0'] * 4)
    assert result.mass == 0
    assert result.mechanism is None
    assert result.to_dict()['D'] == '0'


def test_min_mass_rejects_bad_targets(uniform4):
    with pytest.raises(MalformedInput):
        build_min_mass_lp(uniform4, ['1/4', '1/4'])
    with pytest.raises(MalformedInput):
        build_min_mass_lp(uniform4, ['1/4', '-1/4', '0', '0'])


def test_zero_mass_gives_the_zero_mechanism(uniform4):
    empty = uniform4.with_mass(0, allow_zero_mass=True)
    mech, value = solve_designer(empty, Fill())
    assert value == 0
    assert all(v == 0 for v in mech.a.flatten())


def test_min_mass_multipliers_of_interior_targets(uniform4):
    targets = ['1/16', '1/8', '3/16', '1/4']
    result = solve_min_mass(uniform4, targets)
    assert result.mass == 1
    cert = dual_certificate(uniform4, result.lp, result.solution)
    assert cert.pos_scaled == [4, 2, Fraction(4, 3), 1]
    assert cert.pos_matches_closed_form
    assert cert.value_matches_closed_form


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_lp_vertices_on_convex_instances(data):
    inst = data.draw(instances(max_n=8, nonincreasing=True))
    obj = data.draw(st.one_of(st.just(Fill()), linear_objectives(inst.n)))
    mech, value = solve_designer(inst, obj)
    assert mon_profile(inst, mech)[1]
    lottery = to_common_lottery(inst, mech)
    assert lottery.total <= 1
    assert position_masses(inst, expand_common_lottery(inst, lottery)) == position_masses(inst, mech)
    assert value == obj.evaluate(list(optimal_masses(inst, obj).s))


@settings(max_examples=100, deadline=None)
@given(instances(max_n=6, nonincreasing=True), st.integers(min_value=1, max_value=9))
def test_optimal_mechanism_is_the_fill_lottery(inst, tenths):
    inst = inst.with_mass(fill_cost(inst) * Fraction(tenths, 10))
    assume(convexity_report(inst).is_strictly_convex)
    mech, _ = solve_designer(inst, Fill())
    lottery = to_common_lottery(inst, mech)
    assert list(lottery.c) == list(optimal_lottery_fill(inst).c)
    assert position_masses(inst, expand_common_lottery(inst, lottery)) == position_masses(inst, mech)


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_min_mass_multipliers_match_the_closed_form(data):
    inst = data.draw(instances(max_n=6, nonincreasing=True))
    lottery = CommonLottery(data.draw(lotteries(inst.n, positive=True)))
    targets = position_masses(inst, expand_common_lottery(inst, lottery))
    result = solve_min_mass(inst, targets)
    cert = dual_certificate(inst, result.lp, result.solution)
    assert cert.complementary_slackness_ok
    assert cert.value_matches_closed_form
    assert cert.pos_matches_closed_form
