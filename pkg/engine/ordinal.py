# -*- coding: utf-8 -*-
"""
.. module:: engine
   :platform: Unix
   :synopsis: Common ordinal preferences with heterogeneous cardinal utilities

   Agents share the ranking of position qualities Q but differ in a utility
   parametrization gamma, drawn independently of the outside-option quality.
   Each gamma gives a view of the problem on an uneven utility grid with the
   cdf of outside options carried over unchanged.
"""

import numpy as np

from engine.base_objective import Linear
from engine.errors import (BadMass, ConvexityHypothesisFailed, DimensionMismatch, InfeasibleInput,
                           MalformedInput, NegativeCapacity, NonPositiveTypeMass, PmfNotNormalized,
                           UnknownGamma, UnsupportedObjective)
from engine.instance import ConvexityReport, Instance
from engine.mechanism import CommonLottery, PositionMasses
from engine.optimizer import greedy_masses, lottery_from_masses
from engine.rational import (ONE, ZERO, format_rational, frozen, matrix_to_strings,
                             rational_matrix, rational_vector, to_rational, vector_to_strings)
from engine.transform import decompose, grid_multipliers

import logging
logging.basicConfig()
logger = logging.getLogger('Ordinal-Extension')
logger.setLevel(logging.INFO)


def _strictly_increasing(values):
    return all(values[k] < values[k + 1] for k in range(len(values) - 1))


class OrdinalInstance(object):
    """ Instance with a common quality ranking and per-gamma utilities.

        ``utility[g, k]`` is u(q_k; gamma_g). The joint distribution of
        (outside option, gamma) is the product of ``outside_pmf`` and
        ``gamma_pmf``.
    """

    def __init__(self, qualities, outside_pmf, gammas, gamma_pmf, utility, g, d):
        """ Constructor

            Args:
                ``qualities`` (iterable): strictly increasing qualities q_0 < ... < q_{N-1}
                ``outside_pmf`` (iterable): pmf of outside-option qualities over Q
                ``gammas`` (list(str)): names of the utility parametrizations
                ``gamma_pmf`` (iterable): pmf over ``gammas``
                ``utility`` (nested iterable): |Gamma| x N utility table
                ``g`` (iterable): position pmf over Q
                ``d`` (rational): agent mass
        """
        self.qualities = rational_vector(qualities)
        n = len(self.qualities)
        self.outside_pmf = rational_vector(outside_pmf, length=n)
        self.gammas = [str(name) for name in gammas]
        self.gamma_pmf = rational_vector(gamma_pmf, length=len(self.gammas))
        self.utility = rational_matrix(utility, shape=(len(self.gammas), n))
        self.g = rational_vector(g, length=n)
        self.d = to_rational(d)

        if n < 2:
            raise DimensionMismatch('need at least two qualities')
        if len(set(self.gammas)) != len(self.gammas) or not self.gammas:
            raise MalformedInput('gamma names must be distinct and nonempty')
        if not _strictly_increasing(self.qualities):
            raise MalformedInput('qualities must be strictly increasing')
        for name, row in zip(self.gammas, self.utility):
            if not _strictly_increasing(row):
                raise MalformedInput('utility of {} is not strictly increasing'.format(name))
        if any(v <= 0 for v in self.outside_pmf):
            raise NonPositiveTypeMass('outside-option pmf needs full support')
        if any(v <= 0 for v in self.gamma_pmf):
            raise NonPositiveTypeMass('every gamma needs positive probability')
        if any(v < 0 for v in self.g):
            raise NegativeCapacity('capacities must be nonnegative')
        for label, pmf in (('outside-option', self.outside_pmf), ('gamma', self.gamma_pmf),
                           ('position', self.g)):
            if sum(pmf, ZERO) != ONE:
                raise PmfNotNormalized('{} pmf sums to {}'.format(label, format_rational(sum(pmf))))
        if self.d <= 0:
            raise BadMass('agent mass must be positive')
        self.H = frozen(np.cumsum(self.outside_pmf))

    @property
    def n(self):
        return len(self.qualities)

    def gamma_index(self, gamma):
        try:
            return self.gammas.index(gamma)
        except ValueError:
            raise UnknownGamma('unknown gamma {!r}'.format(gamma))

    def to_dict(self):
        return {'Q': vector_to_strings(self.qualities), 'hQ': vector_to_strings(self.outside_pmf),
                'Gamma': list(self.gammas), 'hGamma': vector_to_strings(self.gamma_pmf),
                'u': matrix_to_strings(self.utility), 'g': vector_to_strings(self.g),
                'D': format_rational(self.d)}

    @classmethod
    def from_dict(cls, data):
        """ Build from {"Q", "hQ", "Gamma", "hGamma", "u", "g", "D"}
        """
        try:
            return cls(data['Q'], data['hQ'], data['Gamma'], data['hGamma'], data['u'],
                       data['g'], data['D'])
        except (KeyError, TypeError) as err:
            raise DimensionMismatch('malformed ordinal instance: {}'.format(err))


class UnevenGridView(object):
    """ One gamma's problem in utility space: grid x and outside-option cdf F
    """

    def __init__(self, x, F):
        self.x = rational_vector(x)
        self.F = rational_vector(F, length=len(self.x))
        assert _strictly_increasing(self.x), 'grid must be strictly increasing'
        assert _strictly_increasing(self.F) and self.F[-1] == ONE, 'F must increase to one'

    @property
    def n(self):
        return len(self.x)

    @property
    def f(self):
        return [self.F[0]] + [self.F[k] - self.F[k - 1] for k in range(1, self.n)]

    def to_dict(self):
        return {'x': vector_to_strings(self.x), 'F': vector_to_strings(self.F)}


def normalize_gamma(oi, gamma):
    """ View of ``gamma``: x_k = u(q_k; gamma), F_k = H(q_k)

        Raises:
            :class:`UnknownGamma`
    """
    row = oi.utility[oi.gamma_index(gamma)]
    return UnevenGridView(list(row), list(oi.H))


def uneven_convexity(view):
    """ Entry i: (x_{i+1}-x_i)/F_{i-1} - (x_{i+1}-x_{i-1})/F_i + (x_i-x_{i-1})/F_{i+1}
    """
    x, F = view.x, view.F
    entries = [(x[i + 1] - x[i]) / F[i - 1] - (x[i + 1] - x[i - 1]) / F[i]
               + (x[i] - x[i - 1]) / F[i + 1] for i in range(1, view.n - 1)]
    return ConvexityReport(entries)


def uneven_multipliers(view):
    return grid_multipliers(view.f, list(view.F), list(view.x))


def verify_uneven_decomposition(view, mech):
    """ Participation decomposition on an uneven grid; the residual is zero

        Raises:
            :class:`InfeasibleInput` when ``mech`` is not supported on k >= i
    """
    if mech.n != view.n:
        raise DimensionMismatch('mechanism is {0}x{0}, view has N={1}'.format(mech.n, view.n))
    if not mech.is_ex_post_ir_clean:
        raise InfeasibleInput('decomposition needs a matrix supported on k >= i')
    report = decompose(view.f, list(view.F), list(view.x), mech.a, uneven_multipliers(view))
    assert report.residual == 0, 'uneven decomposition residual {}'.format(report.residual)
    return report


def baseline_instance(oi):
    """ Budget problem over Q: prices 1/H(q_k), independent of gamma
    """
    return Instance(oi.n, oi.outside_pmf, oi.g, oi.d)


def failing_gammas(oi):
    return [name for name in oi.gammas if not uneven_convexity(normalize_gamma(oi, name)).is_convex]


def optimal_common_lottery_ordinal(oi, obj):
    """ Optimal gamma-independent common lottery over Q

        Args:
            ``oi`` (:class:`OrdinalInstance`): instance
            ``obj`` (:class:`Linear` or :class:`Fill`): objective

        Returns:
            :class:`CommonLottery`

        Raises:
            :class:`ConvexityHypothesisFailed` listing every gamma whose view is not convex
    """
    if not isinstance(obj, Linear):
        raise UnsupportedObjective('ordinal optimizer needs a Fill or Linear objective')
    failing = failing_gammas(oi)
    if failing:
        raise ConvexityHypothesisFailed(failing)
    inst = baseline_instance(oi)
    lottery = lottery_from_masses(inst, PositionMasses(greedy_masses(inst, obj.weights_for(oi.n))))
    logger.info('Ordinal common lottery {}'.format(vector_to_strings(lottery.c)))
    return lottery


def ordinal_position_masses(oi, cl):
    """ s_k = D c_k H(q_k)
    """
    return PositionMasses([oi.d * c * H for c, H in zip(cl.c, oi.H)])


def aggregate_per_gamma(oi, per_gamma):
    """ Mix per-gamma lotteries with the gamma pmf: c_k = sum_gamma h(gamma) c_k^gamma

        Args:
            ``oi`` (:class:`OrdinalInstance`): instance
            ``per_gamma`` (dict): gamma name -> :class:`CommonLottery`

        Returns:
            :class:`CommonLottery`
    """
    unknown = [name for name in per_gamma if name not in oi.gammas]
    if unknown:
        raise UnknownGamma('unknown gammas {}'.format(unknown))
    missing = [name for name in oi.gammas if name not in per_gamma]
    if missing or any(cl.n != oi.n for cl in per_gamma.values()):
        raise DimensionMismatch('need one {}-entry lottery per gamma, missing {}'.format(
            oi.n, missing))
    c = [sum((oi.gamma_pmf[oi.gamma_index(name)] * per_gamma[name].c[k] for name in oi.gammas),
             ZERO) for k in range(oi.n)]
    return CommonLottery(c)


def mixed_position_masses(oi, per_gamma):
    """ sum_gamma h(gamma) s(c^gamma): masses allocated when each gamma gets its own lottery
    """
    total = [ZERO] * oi.n
    for name in oi.gammas:
        weight = oi.gamma_pmf[oi.gamma_index(name)]
        for k, s in enumerate(ordinal_position_masses(oi, per_gamma[name]).s):
            total[k] += weight * s
    return PositionMasses(total)
