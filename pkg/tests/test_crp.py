# -*- coding: utf-8 -*-
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from engine.crp import (caps_from_lottery, continuum_crp, convergence_slope, quotas,
                        random_priority, serial_dictatorship, simulate_finite)
from engine.errors import BadQuota, CapsInfeasible, DimensionMismatch
from engine.mechanism import CommonLottery, DirectMechanism, expand_common_lottery, position_masses
from engine.optimizer import optimal_lottery_fill
from tests.strategies import feasible_lotteries, instances

FIG1_CAPS = ['0', '5/24', '1/4', '1/4']


def test_fig1_cutoffs(uniform4):
    result = continuum_crp(uniform4, FIG1_CAPS)
    assert result.cutoffs == [Fraction(1, 4), Fraction(7, 12), Fraction(1)]
    assert [k for _, _, k in result.thresholds] == [3, 2, 1]
    assert result.allocation == expand_common_lottery(uniform4, optimal_lottery_fill(uniform4))
    assert result.to_dict()['thresholds'][1] == [2, '7/12', 2]


def test_uncapped_random_priority(uniform4):
    result = random_priority(uniform4)
    assert result.cutoffs == [Fraction(1, 4), Fraction(7, 12), Fraction(1)]


def test_caps_are_checked(uniform4):
    with pytest.raises(CapsInfeasible):
        continuum_crp(uniform4, ['0', '0', '0', '1/2'])
    with pytest.raises(CapsInfeasible):
        continuum_crp(uniform4, ['0', '0', '-1/8', '1/4'])
    with pytest.raises(DimensionMismatch):
        continuum_crp(uniform4, ['1/4', '1/4'])


def test_quotas(uniform4):
    assert list(quotas(uniform4, FIG1_CAPS, 1000)) == [0, 208, 250, 250]


def test_serial_dictatorship_sweep():
    types = np.array([3, 0, 1, 3, 2])
    wins = serial_dictatorship(types, np.array([0, 1, 1, 1]), 4)
    expected = np.zeros((4, 4), dtype=np.int64)
    expected[3, 3] = 1
    expected[2, 0] = 1
    expected[1, 1] = 1
    assert np.array_equal(wins, expected)


def test_simulation_is_reproducible(uniform4):
    first = simulate_finite(uniform4, FIG1_CAPS, 400, 3, seed=11, workers=2)
    second = simulate_finite(uniform4, FIG1_CAPS, 400, 3, seed=11, workers=1)
    assert np.array_equal(first.wins, second.wins)
    assert first.replications == 3
    assert len(first.rows()) == 10
    assert first.to_dict()['seed'] == 11


def test_simulation_rejects_empty_markets(uniform4):
    with pytest.raises(BadQuota):
        simulate_finite(uniform4, FIG1_CAPS, 0, 3, seed=1)
    with pytest.raises(BadQuota):
        simulate_finite(uniform4, FIG1_CAPS, 10, 0, seed=1)


@settings(max_examples=100, deadline=None)
@given(instances())
def test_optimal_lottery_round_trip(inst):
    lottery = optimal_lottery_fill(inst)
    result = continuum_crp(inst, caps_from_lottery(inst, lottery))
    assert result.allocation == expand_common_lottery(inst, lottery)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_feasible_lottery_round_trip(data):
    inst = data.draw(instances(max_n=8))
    lottery = CommonLottery(data.draw(feasible_lotteries(inst)))
    result = continuum_crp(inst, caps_from_lottery(inst, lottery))
    assert result.allocation == expand_common_lottery(inst, lottery)


def test_crp_cannot_reproduce_the_binary_menu(fig4_instance, fig4):
    menu = DirectMechanism.from_dict(fig4['binary_menu'])
    result = continuum_crp(fig4_instance, position_masses(fig4_instance, menu))
    assert result.allocation.a[2, 0] == Fraction(1, 3)
    assert result.allocation.a[1, 0] == Fraction(2, 3)
    assert menu.a[2, 0] == 0
    assert result.allocation != menu


@pytest.mark.slow
def test_large_market_matches_the_continuum(uniform4):
    result = simulate_finite(uniform4, FIG1_CAPS, 100000, 20, seed=2019)
    for k, i, empirical, stderr, analytic in result.rows():
        assert abs(empirical - analytic) <= 4 * stderr, (k, i)


@pytest.mark.slow
def test_convergence_rate(uniform4):
    fit = convergence_slope(uniform4, FIG1_CAPS, sizes=(1000, 10000, 100000), replications=20)
    assert -0.65 <= fit.slope <= -0.35
