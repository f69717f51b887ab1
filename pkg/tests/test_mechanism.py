# -*- coding: utf-8 -*-
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from engine.base_objective import BaseObjective, Fill, Linear, evaluate_objective
from engine.errors import (DimensionMismatch, IndexOutOfRange, InfeasibleInput, LotteryOverflow,
                           MalformedInput)
from engine.instance import Instance
from engine.mechanism import (CommonLottery, DirectMechanism, bundle_costs, classify_binding,
                              expand_common_lottery, feasibility_report, ic_slack, ic_slack_matrix,
                              lottery_masses, mechanism_value, mon_profile, participation,
                              position_masses, read_common_lottery, redundant_ic_pairs)
from tests.strategies import instances, locally_incentive_compatible, lotteries


def test_first_best_is_infeasible(fig1, uniform4):
    first_best = DirectMechanism.from_dict(fig1['first_best'])
    assert mechanism_value(uniform4, first_best, Fill()) == 1
    report = feasibility_report(uniform4, first_best)
    assert not report.is_feasible
    assert (0, 1) in report.violated_ics


def test_uniform_lottery_value(uniform4):
    mech = expand_common_lottery(uniform4, CommonLottery(['1/4'] * 4))
    assert mechanism_value(uniform4, mech, Fill()) == Fraction(5, 8)
    assert feasibility_report(uniform4, mech).is_feasible


def test_fig2_mechanisms(fig2, uniform4):
    for name in ('binary_menu', 'ceei'):
        mech = DirectMechanism.from_dict(fig2[name])
        assert feasibility_report(uniform4, mech).is_feasible
        assert mechanism_value(uniform4, mech, Fill()) == Fraction(fig2['expected'][name])


def test_ceei_bundles_cost_the_budget(fig2):
    ceei = DirectMechanism.from_dict(fig2['ceei'])
    assert bundle_costs(ceei, fig2['ceei_prices']) == [Fraction(3, 4)] * 4


def test_fig3_violates_only_ic_2_0(fig3_pair):
    inst, mech = fig3_pair
    report = feasibility_report(inst, mech)
    assert report.violated_ics == [(2, 0)]
    assert ic_slack(inst, mech, 2, 0) == Fraction(-1, 15)
    assert report.positions_ok and report.agents_ok
    assert report.to_dict()['violated_ics'] == [[2, 0]]


def test_ic_slack_index_errors(fig3_pair):
    inst, mech = fig3_pair
    with pytest.raises(IndexOutOfRange):
        ic_slack(inst, mech, 1, 1)
    with pytest.raises(IndexOutOfRange):
        ic_slack(inst, mech, 0, 4)


def test_dimension_mismatch(uniform4):
    with pytest.raises(DimensionMismatch):
        feasibility_report(uniform4, DirectMechanism([[1, 0], [0, 0]]))
    with pytest.raises(DimensionMismatch):
        DirectMechanism.from_dict({'a': [['1', '0'], ['0']]})


def test_lottery_guards():
    with pytest.raises(LotteryOverflow):
        CommonLottery(['1/2', '2/3'])
    with pytest.raises(DimensionMismatch):
        CommonLottery(['1/2', '-1/4'])
    lottery = CommonLottery(['1/2', '2/3'], allow_overflow=True)
    assert lottery.overflows
    with pytest.raises(LotteryOverflow):
        expand_common_lottery(Instance(2, ['1/2', '1/2'], ['1/2', '1/2'], 1), lottery)


def test_participation_and_masses(fig2_menu, uniform4):
    assert list(participation(fig2_menu)) == [1, 1, Fraction(1, 4), Fraction(1, 4)]
    s = position_masses(uniform4, fig2_menu).s
    assert list(s) == [0, Fraction(1, 4), Fraction(1, 4), Fraction(1, 8)]
    _, monotone = mon_profile(uniform4, fig2_menu)
    assert monotone


def test_read_common_lottery(uniform4, fig3_pair):
    lottery = CommonLottery(['0', '5/12', '1/3', '1/4'])
    assert read_common_lottery(expand_common_lottery(uniform4, lottery)) == lottery
    assert read_common_lottery(fig3_pair[1]) is None


def test_classify_binding_partitions_all_pairs(fig2_menu, uniform4):
    partition = classify_binding(uniform4, fig2_menu)
    pairs = set((i, j) for i in range(4) for j in range(4) if i != j)
    assert partition.redundant | partition.binding | partition.slack == pairs
    assert not partition.redundant & partition.binding
    assert not partition.binding & partition.slack
    assert (3, 0) in partition.redundant


def test_classify_binding_needs_feasible(fig3_pair):
    with pytest.raises(InfeasibleInput):
        classify_binding(*fig3_pair)


def test_linear_objective_value(uniform4, fig2_menu):
    obj = Linear(['0', '0', '0', '1'])
    assert mechanism_value(uniform4, fig2_menu, obj) == Fraction(1, 8)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_common_lotteries_satisfy_every_ic(data):
    inst = data.draw(instances())
    lottery = CommonLottery(data.draw(lotteries(inst.n)))
    mech = expand_common_lottery(inst, lottery)
    report = feasibility_report(inst, mech)
    assert report.violated_ics == []
    assert report.mon_ok
    assert position_masses(inst, mech) == lottery_masses(inst, lottery)


class _TopHeavy(BaseObjective):
    kind = 'top-heavy'

    def evaluate(self, s):
        return s[-1] * s[-1]


def test_evaluate_objective_accepts_plugins(uniform4):
    mech = expand_common_lottery(uniform4, CommonLottery(['1/4'] * 4))
    masses = position_masses(uniform4, mech)
    assert evaluate_objective(Fill(), masses) == Fraction(5, 8)
    assert evaluate_objective(Linear([0, 0, 0, 2]), masses) == Fraction(1, 2)
    assert evaluate_objective(_TopHeavy(), masses) == Fraction(1, 16)
    assert evaluate_objective(_TopHeavy(), [0, Fraction(1, 2)]) == Fraction(1, 4)


def test_objective_weights_must_cover_positions(uniform4):
    with pytest.raises(MalformedInput):
        Linear([])
    with pytest.raises(DimensionMismatch):
        Linear([1, 1]).weights_for(uniform4.n)
    Fill().check_positions(uniform4.n)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_local_upward_ics_and_mon_imply_the_redundant_ones(data):
    inst = data.draw(instances(max_n=8))
    mech = DirectMechanism(data.draw(locally_incentive_compatible(inst.n)))
    slack = ic_slack_matrix(inst, mech)
    assert all(slack[i, i + 1] >= 0 for i in range(inst.n - 1))
    assert mon_profile(inst, mech)[1]
    for i, j in redundant_ic_pairs(inst.n):
        assert slack[i, j] >= 0, (i, j)
