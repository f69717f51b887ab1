# -*- coding: utf-8 -*-
from fractions import Fraction

import pytest
from hypothesis import given, settings

from engine.errors import (BadMass, DimensionMismatch, GridTooSmall, IndexOutOfRange,
                           MalformedInput, NegativeCapacity, NonPositiveTypeMass, PmfNotNormalized)
from engine.instance import Instance, convexity_report, fill_cost, new_instance
from tests.strategies import instances


def test_cdf_and_grid(uniform4):
    assert list(uniform4.F) == [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]
    assert uniform4.grid_point(3) == 1
    assert uniform4.grid_point(1) == Fraction(1, 3)
    with pytest.raises(IndexOutOfRange):
        uniform4.cdf(4)


@pytest.mark.parametrize('n, f, g, d, error', [
    (1, ['1'], ['1'], 1, GridTooSmall),
    (2, ['1/2', '1/3'], ['1/2', '1/2'], 1, PmfNotNormalized),
    (2, ['1/2', '1/2'], ['1/2', '1/3'], 1, PmfNotNormalized),
    (2, ['1', '0'], ['1/2', '1/2'], 1, NonPositiveTypeMass),
    (2, ['1/2', '1/2'], ['3/2', '-1/2'], 1, NegativeCapacity),
    (2, ['1/2', '1/2'], ['1/2', '1/2'], 0, BadMass),
    (3, ['1/2', '1/2'], ['1/2', '1/2'], 1, DimensionMismatch),
    (2, ['a', '1/2'], ['1/2', '1/2'], 1, MalformedInput),
])
def test_validation(n, f, g, d, error):
    with pytest.raises(error):
        new_instance(n, f, g, d)


def test_zero_mass_only_when_allowed(uniform4):
    inst = uniform4.with_mass(0, allow_zero_mass=True)
    assert inst.d == 0
    with pytest.raises(BadMass):
        uniform4.with_mass(0)


def test_dict_round_trip(fig4_instance):
    data = fig4_instance.to_dict()
    assert data['f'] == ['1/3', '1/12', '7/12']
    assert Instance.from_dict(data) == fig4_instance


def test_from_dict_missing_key():
    with pytest.raises(MalformedInput):
        Instance.from_dict({'n': 2, 'f': ['1/2', '1/2']})


def test_fig4_is_not_convex(fig4_instance):
    report = convexity_report(fig4_instance)
    assert report.second_differences == (Fraction(-4, 5),)
    assert not report.is_convex
    assert report.violation_indices == [1]


def test_two_point_grid_is_vacuously_convex():
    report = convexity_report(Instance(2, ['1/3', '2/3'], ['1/2', '1/2'], 1))
    assert report.second_differences == ()
    assert report.is_convex


def test_fill_cost(uniform4):
    assert fill_cost(uniform4) == Fraction(25, 12)


@settings(max_examples=60, deadline=None)
@given(instances(nonincreasing=True))
def test_nonincreasing_pmf_gives_convex_reciprocal_cdf(inst):
    assert convexity_report(inst).is_convex
