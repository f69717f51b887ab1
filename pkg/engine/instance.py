# -*- coding: utf-8 -*-
"""
.. module:: engine
   :platform: Unix
   :synopsis: Problem instances on the evenly spaced grid and the convexity test on 1/F

"""

from fractions import Fraction

import numpy as np

from engine.errors import (BadMass, DimensionMismatch, GridTooSmall, IndexOutOfRange,
                           NegativeCapacity, NonPositiveTypeMass, PmfNotNormalized)
from engine.rational import (ONE, ZERO, format_rational, frozen, rational_vector,
                             to_rational, vector_to_strings)

import logging
logging.basicConfig()
logger = logging.getLogger('Instance')
logger.setLevel(logging.INFO)


class Instance(object):
    """ Finite-type instance.

        Types (outside options) and positions live on the same grid
        x_k = theta_k = k/(N-1); grid points are computed from indices and
        never stored. ``f`` is the type pmf, ``g`` the position pmf (total
        position mass 1) and ``d`` the agent mass.
    """

    def __init__(self, n, f, g, d, allow_zero_mass=False):
        """ Constructor

            Args:
                ``n`` (int): grid size N
                ``f`` (iterable): type pmf, N rationals
                ``g`` (iterable): position pmf, N rationals
                ``d`` (rational): agent mass D
                ``allow_zero_mass`` (bool): accept D = 0 (limit computations only)
        """
        if isinstance(n, bool) or int(n) != n:
            raise GridTooSmall('grid size must be an integer, got {!r}'.format(n))
        n = int(n)
        if n < 2:
            raise GridTooSmall('grid size must be at least 2, got {}'.format(n))
        f = list(f)
        g = list(g)
        if len(f) != n or len(g) != n:
            raise DimensionMismatch('f and g must have {} entries'.format(n))
        self._n = n
        self._f = rational_vector(f)
        self._g = rational_vector(g)
        self._d = to_rational(d)

        if any(v <= 0 for v in self._f):
            raise NonPositiveTypeMass('every type needs positive mass: {}'.format(
                vector_to_strings(self._f)))
        if any(v < 0 for v in self._g):
            raise NegativeCapacity('capacities must be nonnegative: {}'.format(
                vector_to_strings(self._g)))
        if sum(self._f) != ONE:
            raise PmfNotNormalized('type pmf sums to {}'.format(format_rational(sum(self._f))))
        if sum(self._g) != ONE:
            raise PmfNotNormalized('position pmf sums to {}'.format(format_rational(sum(self._g))))
        if self._d < 0 or (self._d == 0 and not allow_zero_mass):
            raise BadMass('agent mass must be positive, got {}'.format(format_rational(self._d)))

        self._F = frozen(np.cumsum(self._f))

    @property
    def n(self):
        return self._n

    @property
    def f(self):
        return self._f

    @property
    def g(self):
        return self._g

    @property
    def d(self):
        return self._d

    @property
    def F(self):
        """ Cdf values F(theta_0), ..., F(theta_{N-1})
        """
        return self._F

    def cdf(self, i):
        self._check_index(i)
        return self._F[i]

    def grid_point(self, k):
        """ x_k = theta_k = k/(N-1)
        """
        self._check_index(k)
        return Fraction(k, self._n - 1)

    def with_mass(self, d, allow_zero_mass=False):
        """ Same distributions, different agent mass
        """
        return Instance(self._n, self._f, self._g, d, allow_zero_mass=allow_zero_mass)

    def _check_index(self, i):
        if not 0 <= i < self._n:
            raise IndexOutOfRange('index {} outside [0, {})'.format(i, self._n))

    def to_dict(self):
        return {'n': self._n,
                'f': vector_to_strings(self._f),
                'g': vector_to_strings(self._g),
                'D': format_rational(self._d)}

    @classmethod
    def from_dict(cls, data):
        """ Build from the JSON schema {"n", "f", "g", "D"}
        """
        try:
            return new_instance(data['n'], data['f'], data['g'], data['D'])
        except (KeyError, TypeError) as err:
            raise DimensionMismatch('malformed instance: {}'.format(err))

    def __eq__(self, other):
        return (isinstance(other, Instance) and self._n == other._n and self._d == other._d
                and list(self._f) == list(other._f) and list(self._g) == list(other._g))

    def __hash__(self):
        return hash((self._n, tuple(self._f), tuple(self._g), self._d))

    def __repr__(self):
        return 'Instance(n={}, f={}, g={}, D={})'.format(
            self._n, vector_to_strings(self._f), vector_to_strings(self._g),
            format_rational(self._d))


class ConvexityReport(object):
    """ Exact second differences of 1/F (or of its uneven-grid analogue).

        ``violation_indices`` are interior grid indices i (1 <= i <= N-2).
    """

    def __init__(self, second_differences):
        self.second_differences = tuple(second_differences)
        self.is_convex = all(v >= 0 for v in self.second_differences)
        self.is_strictly_convex = all(v > 0 for v in self.second_differences)
        self.violation_indices = [i + 1 for i, v in enumerate(self.second_differences) if v < 0]

    def to_dict(self):
        return {'second_differences': vector_to_strings(self.second_differences),
                'is_convex': self.is_convex,
                'is_strictly_convex': self.is_strictly_convex,
                'violation_indices': list(self.violation_indices)}


def new_instance(n, f, g, d):
    """ Validated instance constructor

        Args:
            ``n`` (int): grid size
            ``f`` (iterable): type pmf
            ``g`` (iterable): position pmf
            ``d`` (rational): agent mass

        Returns:
            :class:`Instance`
    """
    inst = Instance(n, f, g, d)
    logger.debug('New instance: {}'.format(inst))
    return inst


def cdf(inst, i):
    return inst.cdf(i)


def reciprocal_cdf(inst):
    return [ONE / v for v in inst.F]


def second_differences(values):
    """ v_{i-1} - 2 v_i + v_{i+1} for every interior i
    """
    values = list(values)
    return [values[i - 1] - 2 * values[i] + values[i + 1] for i in range(1, len(values) - 1)]


def convexity_report(inst):
    """ Discrete convexity of 1/F on the type grid

        Args:
            ``inst`` (:class:`Instance`): instance

        Returns:
            :class:`ConvexityReport`; vacuously convex when N = 2
    """
    report = ConvexityReport(second_differences(reciprocal_cdf(inst)))
    if not report.is_convex:
        logger.info('1/F is not convex at {}'.format(report.violation_indices))
    return report


def fill_cost(inst):
    """ Agent mass needed to fill every position with a common lottery: sum g_k/F_k
    """
    return sum((g / F for g, F in zip(inst.g, inst.F)), ZERO)
