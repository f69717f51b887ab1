# -*- coding: utf-8 -*-
"""
.. module:: engine
   :platform: Unix
   :synopsis: Common-lottery transform, participation decomposition and allocation operations

   IC expressions in this module are taken to the left-hand side and scaled
   by (N-1): on the baseline grid the weight of position k for type i is the
   integer k - i. The grid-generic routines accept any strictly increasing
   utility grid x, so the same code serves uneven grids.
"""

from fractions import Fraction

from engine.errors import (BadIndices, DimensionMismatch, IndexOutOfRange, InfeasibleInput,
                           InsufficientMass)
from engine.mechanism import (CommonLottery, DirectMechanism, feasibility_report,
                              position_masses)
from engine.rational import (ONE, ZERO, format_rational, frozen, matrix_to_strings,
                             vector_to_strings, zeros)

import logging
logging.basicConfig()
logger = logging.getLogger('Lottery-Transform')
logger.setLevel(logging.INFO)


class Multipliers(object):
    """ IC multipliers of the decomposition.

        ``local_up[i]`` is lambda_{i,i+1}; ``down[i, j]`` (j < i) is
        lambda_{i,j}; every other pair has multiplier zero. Row N-1 of
        ``down`` is zero because IC_{N-1,j} vanishes identically.
    """

    def __init__(self, local_up, down):
        self.local_up = tuple(local_up)
        self.down = frozen(down)

    @property
    def n(self):
        return self.down.shape[0]

    def value(self, i, j):
        if j == i + 1:
            return self.local_up[i]
        if j < i:
            return self.down[i, j]
        return ZERO

    def pairs(self):
        """ (i, j, lambda) for every pair with a nonzero multiplier
        """
        out = [(i, i + 1, v) for i, v in enumerate(self.local_up) if v != 0]
        out += [(i, j, self.down[i, j]) for i in range(self.n) for j in range(i)
                if self.down[i, j] != 0]
        return out

    @property
    def all_nonnegative(self):
        return (all(v >= 0 for v in self.local_up)
                and all(self.down[i, j] >= 0 for i in range(self.n) for j in range(i)))

    def to_dict(self):
        return {'local_up': vector_to_strings(self.local_up),
                'down': matrix_to_strings(self.down),
                'all_nonnegative': self.all_nonnegative}


class DecompositionReport(object):
    """ P(theta_0) = common_term + info_term + residual, with residual = 0
    """

    def __init__(self, common_term, info_term, p_theta0):
        self.common_term = common_term
        self.info_term = info_term
        self.p_theta0 = p_theta0
        self.residual = p_theta0 - common_term - info_term

    def to_dict(self):
        return {'common_term': format_rational(self.common_term),
                'info_term': format_rational(self.info_term),
                'p_theta0': format_rational(self.p_theta0),
                'residual': format_rational(self.residual)}


def baseline_grid(n):
    """ Positions scaled by (N-1): x_k = k
    """
    return [Fraction(k) for k in range(n)]


def grid_multipliers(f, F, x):
    """ Decomposition multipliers on an arbitrary strictly increasing grid

        Args:
            ``f`` (list): type pmf
            ``F`` (list): cdf
            ``x`` (list): utility grid

        Returns:
            :class:`Multipliers`
    """
    n = len(f)
    up = [f[i + 1] / F[i + 1] / (x[i + 1] - x[i]) for i in range(n - 1)]
    down = zeros((n, n))
    for i in range(1, n - 1):
        bracket = ((x[i + 1] - x[i]) / F[i - 1] - (x[i + 1] - x[i - 1]) / F[i]
                   + (x[i] - x[i - 1]) / F[i + 1])
        scale = bracket / ((x[i + 1] - x[i]) * (x[i] - x[i - 1]))
        for j in range(i):
            down[i, j] = f[j] * scale
    return Multipliers(up, down)


def multipliers(inst):
    """ lambda_{i,i+1} = f_{i+1}/F_{i+1}; lambda_{i,j} = f_j (1/F_{i-1} - 2/F_i + 1/F_{i+1})
    """
    return grid_multipliers(list(inst.f), list(inst.F), baseline_grid(inst.n))


def ic_expression(a, x, i, j):
    """ sum_{k>i} (x_k - x_i)(a[k,i] - a[k,j])
    """
    return sum(((x[k] - x[i]) * (a[k, i] - a[k, j]) for k in range(i + 1, len(x))), ZERO)


def decompose(f, F, x, a, mults):
    """ Split P(theta_0) into the common-allocation term and the weighted IC sum

        Args:
            ``f``, ``F``, ``x`` (list): pmf, cdf and grid
            ``a`` (numpy array): allocation matrix supported on k >= i
            ``mults`` (:class:`Multipliers`): multipliers for the same grid

        Returns:
            :class:`DecompositionReport`
    """
    n = len(f)
    p0 = sum(a[:, 0], ZERO)
    common = sum((a[k, i] * f[i] / F[k] for k in range(n) for i in range(k + 1)), ZERO)
    info = sum((lam * ic_expression(a, x, i, j) for i, j, lam in mults.pairs()), ZERO)
    return DecompositionReport(common, info, p0)


def verify_decomposition(inst, mech):
    """ Decomposition report on the baseline grid (IC scaled by N-1)

        The residual is exactly zero for every matrix supported on k >= i.
    """
    if mech.n != inst.n:
        raise DimensionMismatch('mechanism is {0}x{0}, instance has N={1}'.format(mech.n, inst.n))
    if not mech.is_ex_post_ir_clean:
        raise InfeasibleInput('decomposition needs a matrix supported on k >= i')
    report = decompose(list(inst.f), list(inst.F), baseline_grid(inst.n), mech.a, multipliers(inst))
    assert report.residual == 0, 'decomposition residual {}'.format(report.residual)
    return report


def coefficient_matrix(n, x, mults):
    """ Coefficient of every cell a(x_k;theta_i) in sum lambda IC
    """
    coef = zeros((n, n))
    for p, q, lam in mults.pairs():
        for k in range(p + 1, n):
            weight = lam * (x[k] - x[p])
            coef[k, p] += weight
            coef[k, q] -= weight
    return coef


def mu_coefficients(inst):
    """ mu(x_k;theta_i) computed from the weighted IC sum

        Checks mu = -f_i/F_k for i > 0 and mu = 1 - f_0/F_k for i = 0 on
        every cell with k >= i.

        Returns:
            N x N numpy object array (zero above the diagonal)
    """
    n = inst.n
    mu = coefficient_matrix(n, baseline_grid(n), multipliers(inst))
    for k in range(n):
        for i in range(k + 1):
            expected = (ONE if i == 0 else ZERO) - inst.f[i] / inst.F[k]
            assert mu[k, i] == expected, 'mu({}, {}) = {} differs from {}'.format(
                k, i, mu[k, i], expected)
    return frozen(mu)


def _offer_vector(inst, a):
    return [sum((a[k, j] * inst.f[j] for j in range(k + 1)), ZERO) / inst.F[k] for k in range(inst.n)]


def to_common_lottery(inst, mech):
    """ c_k = sum_{j<=k} a(x_k;theta_j) f_j / F(theta_k)

        Position masses are preserved exactly. When 1/F is not convex the
        offers may add up to more than one; the lottery is returned with
        ``overflows`` set instead of raising.

        Raises:
            :class:`InfeasibleInput` when ``mech`` is not feasible
    """
    if not feasibility_report(inst, mech).is_feasible:
        raise InfeasibleInput('to_common_lottery needs a feasible mechanism')
    lottery = CommonLottery(_offer_vector(inst, mech.a), allow_overflow=True)
    if lottery.overflows:
        logger.warning('Common lottery overflows: offers sum to {}'.format(
            format_rational(lottery.total)))
    return lottery


def equalize_position(inst, mech, k):
    """ Replace row k by its f-weighted mean over the types that accept x_k
    """
    if not 0 <= k < inst.n:
        raise IndexOutOfRange('position {} outside the grid'.format(k))
    a = mech.a.copy()
    mean = _offer_vector(inst, mech.a)[k]
    for i in range(k + 1):
        a[k, i] = mean
    return DirectMechanism(a)


def shrink(inst, mech):
    """ Equalize every position (allocation shrinking); no feasibility check
    """
    a = mech.a.copy()
    for k, mean in enumerate(_offer_vector(inst, mech.a)):
        for i in range(k + 1):
            a[k, i] = mean
    return DirectMechanism(a)


def allocation_upgrade(inst, mech, i, from_k, to_k, mass):
    """ Move ``mass`` of type i's probability from position from_k up to to_k

        Raises:
            :class:`BadIndices` unless i <= from_k < to_k < N
            :class:`InsufficientMass` when the source cell holds less than ``mass``
    """
    mass = Fraction(mass)
    if not (0 <= i <= from_k < to_k < inst.n) or mass < 0:
        raise BadIndices('upgrade needs i <= from_k < to_k < N and mass >= 0')
    if mass > mech.a[from_k, i]:
        raise InsufficientMass('cell ({}, {}) holds {} < {}'.format(
            from_k, i, format_rational(mech.a[from_k, i]), format_rational(mass)))
    a = mech.a.copy()
    a[from_k, i] -= mass
    a[to_k, i] += mass
    return DirectMechanism(a)


def maximal_upgrade(inst, mech):
    """ Fill the highest partly vacant position with probability from lower positions

        Types are visited in ascending index and, within a type, the lowest
        source position is drained first. The loop stops when no position
        is partly vacant or no type holds probability below the current
        target position.

        Raises:
            :class:`InfeasibleInput` when ``mech`` is not feasible
    """
    if not feasibility_report(inst, mech).is_feasible:
        raise InfeasibleInput('maximal_upgrade needs a feasible mechanism')
    n, d, f, g = inst.n, inst.d, inst.f, inst.g
    if d == 0:
        return mech
    a = mech.a.copy()
    s = list(position_masses(inst, mech).s)

    def highest_vacant(below):
        return next((k for k in range(below - 1, -1, -1) if s[k] < g[k]), None)

    target = highest_vacant(n)
    while target is not None:
        for i in range(target):
            for k in range(i, target):
                room = g[target] - s[target]
                if room == 0:
                    break
                if a[k, i] == 0:
                    continue
                moved = min(a[k, i], room / (d * f[i]))
                a[k, i] -= moved
                a[target, i] += moved
                s[k] -= d * f[i] * moved
                s[target] += d * f[i] * moved
            if s[target] == g[target]:
                break
        if s[target] < g[target]:
            break
        target = highest_vacant(target)
    logger.debug('Maximal upgrade masses: {}'.format(vector_to_strings(s)))
    return DirectMechanism(a)
