# -*- coding: utf-8 -*-
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings

from engine.base_objective import Fill, Linear, SeparableConcave
from engine.converse import (auto_improve, contraction, find_violation, freed_mass,
                             full_allocation_cutoff, mass_grid, max_epsilon, perturb)
from engine.errors import PreconditionViolation, UnsupportedObjective
from engine.instance import convexity_report, fill_cost
from engine.mechanism import (expand_common_lottery, feasibility_report, mechanism_value,
                              position_masses)
from engine.optimizer import optimal_lottery_fill
from tests.strategies import instances


@pytest.fixture
def fig4_wide(fig4_instance, fig4):
    return fig4_instance.with_mass(Fraction(fig4['perturb_D']))


def test_find_violation(fig4_instance, uniform4):
    assert find_violation(fig4_instance) == 1
    assert find_violation(uniform4) is None


def test_base_lottery_at_three_halves(fig4_wide):
    base = optimal_lottery_fill(fig4_wide)
    assert list(base.c) == [Fraction(11, 45), Fraction(8, 15), Fraction(2, 9)]
    assert full_allocation_cutoff(expand_common_lottery(fig4_wide, base)) == 0


def test_contraction_keeps_position_masses(fig4_wide):
    base = optimal_lottery_fill(fig4_wide)
    epsilon = max_epsilon(fig4_wide, base, 1, 0) / 2
    assert epsilon > 0
    tilde = contraction(fig4_wide, base, 1, 0, epsilon)
    base_mech = expand_common_lottery(fig4_wide, base)
    assert position_masses(fig4_wide, tilde) == position_masses(fig4_wide, base_mech)
    assert freed_mass(fig4_wide, 1, 0, epsilon) == Fraction(4, 15) * epsilon


def test_contraction_preconditions(fig4_wide):
    base = optimal_lottery_fill(fig4_wide)
    with pytest.raises(PreconditionViolation) as err:
        contraction(fig4_wide, base, 1, 0, '-1/100')
    assert err.value.inequality == 'sign'
    with pytest.raises(PreconditionViolation) as err:
        contraction(fig4_wide, base, 0, 0, '1/100')
    assert err.value.inequality == 'indices'
    bound = max_epsilon(fig4_wide, base, 1, 0)
    with pytest.raises(PreconditionViolation) as err:
        contraction(fig4_wide, base, 1, 0, bound * 2)
    assert err.value.inequality in ('cell-bounds', 'agent-slack')


def test_perturb_rejects_too_much_delta(fig4_wide):
    base = optimal_lottery_fill(fig4_wide)
    epsilon = max_epsilon(fig4_wide, base, 1, 0) / 2
    too_much = freed_mass(fig4_wide, 1, 0, epsilon) * 2
    with pytest.raises(PreconditionViolation) as err:
        perturb(fig4_wide, base, 1, 0, epsilon, too_much, 0)
    assert err.value.inequality == 'agent-slack'


def test_fig4_improvement_at_three_halves(fig4_instance, fig4_wide):
    search = auto_improve(fig4_instance, Fill(), d=Fraction(3, 2))
    assert search.found
    mech, gain = search.improvement
    params = search.params
    assert (params['k'], params['i'], params['fill_index']) == (1, 0, 0)
    assert gain > 0
    assert gain == params['D'] * params['delta'] * fig4_wide.F[0]
    assert feasibility_report(fig4_wide, mech).is_feasible
    base = expand_common_lottery(fig4_wide, optimal_lottery_fill(fig4_wide))
    assert mechanism_value(fig4_wide, mech, Fill()) == mechanism_value(fig4_wide, base, Fill()) + gain
    assert search.to_dict()['found']


def test_fig4_diagnostics(fig4_instance):
    at_one = auto_improve(fig4_instance, Fill(), d=1)
    assert not at_one.found
    assert at_one.diagnostic == 'no supported window'
    saturated = auto_improve(fig4_instance, Fill(), d=3)
    assert saturated.diagnostic == 'full-fill feasible'
    assert saturated.to_dict() == {'found': False, 'diagnostic': 'full-fill feasible'}


def test_grid_search_finds_an_improvement(fig4_instance):
    search = auto_improve(fig4_instance, Fill())
    assert search.found
    assert search.params['D'] < fill_cost(fig4_instance)


def test_mass_grid_bounds(fig4_instance):
    grid = mass_grid(fig4_instance, points=8)
    assert grid == sorted(grid)
    assert grid[0] >= Fraction(1, 3) - Fraction(1, 10 ** 6)
    assert grid[-1] <= fill_cost(fig4_instance) + Fraction(1, 10 ** 6)


def test_objective_guards(fig4_instance):
    with pytest.raises(UnsupportedObjective):
        auto_improve(fig4_instance, SeparableConcave(['1'] * 3, '1/2'))
    with pytest.raises(UnsupportedObjective):
        auto_improve(fig4_instance, Linear(['1', '0', '1']))


def test_convex_instance_reports_convexity(uniform4):
    search = auto_improve(uniform4, Fill())
    assert not search.found
    assert search.diagnostic == '1/F convex'


@settings(max_examples=100, deadline=None)
@given(instances(min_n=3, full_support=True))
def test_perturbation_improves_non_convex_instances(inst):
    assume(not convexity_report(inst).is_convex)
    search = auto_improve(inst, Fill())
    if not search.found:
        assert search.diagnostic in ('no supported window', 'full-fill feasible')
        return
    mech, gain = search.improvement
    wide = inst.with_mass(search.params['D'])
    base = expand_common_lottery(wide, optimal_lottery_fill(wide))
    assert gain > 0
    assert feasibility_report(wide, mech).is_feasible
    assert mechanism_value(wide, mech, Fill()) == mechanism_value(wide, base, Fill()) + gain
    assert gain == wide.d * search.params['delta'] * wide.F[search.params['fill_index']]
