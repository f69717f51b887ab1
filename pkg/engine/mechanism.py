# -*- coding: utf-8 -*-
"""
.. module:: engine
   :platform: Unix
   :synopsis: Direct mechanisms, common lotteries and the constraint checker

   Matrices are indexed (k, i): row k is position x_k, column i is type
   theta_i. Utility of type theta_i for position x_k is x_k - theta_i, so a
   type only accepts rows k >= i; cells with k < i are ignored by every
   utility-based quantity and flagged by the ex-post IR check.
"""

from fractions import Fraction

import numpy as np

from engine.base_objective import evaluate_objective
from engine.errors import DimensionMismatch, IndexOutOfRange, InfeasibleInput, LotteryOverflow
from engine.rational import (ONE, ZERO, format_rational, frozen, matrix_to_strings,
                             rational_matrix, rational_vector, vector_to_strings, zeros)

import logging
logging.basicConfig()
logger = logging.getLogger('Mechanism-Checker')
logger.setLevel(logging.INFO)


class DirectMechanism(object):
    """ Probability matrix a(x_k; theta_i).

        Raw matrices may put mass below a type's outside option; that is
        reported by :func:`feasibility_report` rather than refused here.
    """

    def __init__(self, a):
        """ Constructor

            Args:
                ``a`` (nested iterable or numpy array): N x N matrix, row = position
        """
        rows = a.tolist() if isinstance(a, np.ndarray) else [list(r) for r in a]
        n = len(rows)
        self._a = rational_matrix(rows, shape=(n, n))

    @property
    def a(self):
        return self._a

    @property
    def n(self):
        return self._a.shape[0]

    def cell(self, k, i):
        return self._a[k, i]

    @property
    def is_ex_post_ir_clean(self):
        return all(self._a[k, i] == 0 for i in range(self.n) for k in range(i))

    def replace(self, updates):
        """ Copy with some cells overwritten

            Args:
                ``updates`` (dict): (k, i) -> new value
        """
        a = self._a.copy()
        for (k, i), v in updates.items():
            a[k, i] = Fraction(v)
        return DirectMechanism(a)

    def to_dict(self):
        return {'a': matrix_to_strings(self._a)}

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(data['a'])
        except (KeyError, TypeError, IndexError) as err:
            raise DimensionMismatch('malformed mechanism: {}'.format(err))

    def __eq__(self, other):
        return isinstance(other, DirectMechanism) and np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash(tuple(self._a.flatten()))

    def __repr__(self):
        return 'DirectMechanism({})'.format(matrix_to_strings(self._a))


class CommonLottery(object):
    """ One offer distribution c over positions; 1 - sum(c) is the no-offer chance.

        ``overflows`` lotteries (sum > 1) can be represented so that the
        transform can report them; they cannot be expanded.
    """

    def __init__(self, c, allow_overflow=False):
        self._c = rational_vector(c)
        if any(v < 0 for v in self._c):
            raise DimensionMismatch('offer probabilities must be nonnegative')
        if self.overflows and not allow_overflow:
            raise LotteryOverflow('offers sum to {}'.format(format_rational(self.total)))

    @property
    def c(self):
        return self._c

    @property
    def n(self):
        return len(self._c)

    @property
    def total(self):
        return sum(self._c, ZERO)

    @property
    def overflows(self):
        return self.total > ONE

    @property
    def no_offer(self):
        return ONE - self.total

    def to_dict(self):
        return {'c': vector_to_strings(self._c), 'total': format_rational(self.total),
                'overflow': self.overflows}

    def __eq__(self, other):
        return isinstance(other, CommonLottery) and list(self._c) == list(other._c)

    def __hash__(self):
        return hash(tuple(self._c))

    def __repr__(self):
        return 'CommonLottery({})'.format(vector_to_strings(self._c))


class PositionMasses(object):
    """ Utilization vector s: mass of agents accepting each position
    """

    def __init__(self, s, exact=True):
        if exact:
            self._s = rational_vector(s)
        else:
            self._s = frozen(np.array([float(v) for v in s], dtype=float))
        self.exact = exact

    @property
    def s(self):
        return self._s

    @property
    def total(self):
        return sum(self._s, ZERO) if self.exact else float(np.sum(self._s))

    def __len__(self):
        return len(self._s)

    def __iter__(self):
        return iter(self._s)

    def __getitem__(self, k):
        return self._s[k]

    def to_dict(self):
        if self.exact:
            return {'s': vector_to_strings(self._s), 'total': format_rational(self.total)}
        return {'s': [float(v) for v in self._s], 'total': self.total}

    def __eq__(self, other):
        return isinstance(other, PositionMasses) and list(self._s) == list(other._s)

    def __hash__(self):
        return hash(tuple(self._s))

    def __repr__(self):
        return 'PositionMasses({})'.format(
            vector_to_strings(self._s) if self.exact else list(self._s))


class FeasibilityReport(object):
    """ Every constraint slack of a mechanism on an instance
    """

    def __init__(self, ic_slack, participation, position_slack, agent_slack,
                 nonnegative, ex_post_ir_ok, redundant_ics, zero_tolerance=ZERO):
        self.ic_slack = ic_slack
        self.participation = participation
        self.position_slack = position_slack
        self.agent_slack = agent_slack
        self.nonnegative = nonnegative
        self.ex_post_ir_ok = ex_post_ir_ok
        self.redundant_ics = redundant_ics
        n = len(participation)
        tol = zero_tolerance
        self.mon_ok = all(participation[i] >= participation[i + 1] - tol for i in range(n - 1))
        self.violated_ics = sorted((i, j) for i in range(n) for j in range(n)
                                   if i != j and ic_slack[i, j] < -tol)
        self.binding_ics = set((i, j) for i in range(n) for j in range(n)
                               if i != j and abs(ic_slack[i, j]) <= tol)
        self.positions_ok = all(v >= -tol for v in position_slack)
        self.agents_ok = all(v >= -tol for v in agent_slack)
        self.is_feasible = (not self.violated_ics and self.positions_ok and self.agents_ok
                            and self.nonnegative and self.ex_post_ir_ok)

    def to_dict(self):
        return {'is_feasible': self.is_feasible,
                'violated_ics': [list(p) for p in self.violated_ics],
                'ic_slack': matrix_to_strings(self.ic_slack),
                'participation': vector_to_strings(self.participation),
                'mon_ok': self.mon_ok,
                'position_slack': vector_to_strings(self.position_slack),
                'agent_slack': vector_to_strings(self.agent_slack),
                'nonnegative': self.nonnegative,
                'ex_post_ir_ok': self.ex_post_ir_ok,
                'binding_ics': sorted(list(p) for p in self.binding_ics),
                'redundant_ics': sorted(list(p) for p in self.redundant_ics)}


class BindingPartition(object):
    """ IC pairs split into redundant, binding and slack sets
    """

    def __init__(self, redundant, binding, slack):
        self.redundant = redundant
        self.binding = binding
        self.slack = slack

    def to_dict(self):
        return {'redundant': sorted(list(p) for p in self.redundant),
                'binding': sorted(list(p) for p in self.binding),
                'slack': sorted(list(p) for p in self.slack)}


def _check_dimensions(inst, mech):
    if mech.n != inst.n:
        raise DimensionMismatch('mechanism is {0}x{0}, instance has N={1}'.format(mech.n, inst.n))


def _check_pair(inst, i, j):
    if not (0 <= i < inst.n and 0 <= j < inst.n):
        raise IndexOutOfRange('IC pair ({}, {}) outside the grid'.format(i, j))


def ic_slack(inst, mech, i, j):
    """ LHS - RHS of IC_{i,j} (type theta_i must not prefer theta_j's lottery)

        Args:
            ``inst`` (:class:`Instance`): instance
            ``mech`` (:class:`DirectMechanism`): mechanism
            ``i`` (int): true type
            ``j`` (int): reported type

        Returns:
            Fraction sum_{k>=i} (x_k - theta_i)(a(x_k;theta_i) - a(x_k;theta_j)); >= 0 when IC holds
    """
    _check_dimensions(inst, mech)
    _check_pair(inst, i, j)
    if i == j:
        raise IndexOutOfRange('IC pair needs two distinct types, got ({}, {})'.format(i, j))
    a = mech.a
    scale = Fraction(1, inst.n - 1)
    return sum(((k - i) * scale * (a[k, i] - a[k, j]) for k in range(i + 1, inst.n)), ZERO)


def ic_slack_matrix(inst, mech):
    _check_dimensions(inst, mech)
    n = inst.n
    out = zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                out[i, j] = ic_slack(inst, mech, i, j)
    return frozen(out)


def redundant_ic_pairs(n):
    """ IC_{N-1,j} for every j and every non-local upward IC_{i,j}, j >= i+2
    """
    pairs = set((n - 1, j) for j in range(n - 1))
    pairs.update((i, j) for i in range(n) for j in range(i + 2, n))
    return pairs


def participation(mech):
    """ P(theta_i): total assignment probability of each type
    """
    return frozen(np.array([sum(mech.a[:, i], ZERO) for i in range(mech.n)], dtype=object))


def position_masses(inst, mech):
    """ s_k = D sum_{i<=k} a(x_k;theta_i) f(theta_i)

        Args:
            ``inst`` (:class:`Instance`): instance
            ``mech`` (:class:`DirectMechanism`): mechanism

        Returns:
            :class:`PositionMasses`
    """
    _check_dimensions(inst, mech)
    a = mech.a
    return PositionMasses([inst.d * sum((a[k, i] * inst.f[i] for i in range(k + 1)), ZERO)
                           for k in range(inst.n)])


def feasibility_report(inst, mech, zero_tolerance=ZERO):
    """ Evaluate IC, position feasibility, agent feasibility and ex-post IR

        Args:
            ``inst`` (:class:`Instance`): instance
            ``mech`` (:class:`DirectMechanism`): mechanism
            ``zero_tolerance`` (Fraction): slack treated as zero; keep 0 for exact inputs

        Returns:
            :class:`FeasibilityReport`
    """
    _check_dimensions(inst, mech)
    slack = ic_slack_matrix(inst, mech)
    p = participation(mech)
    s = position_masses(inst, mech)
    report = FeasibilityReport(
        ic_slack=slack,
        participation=p,
        position_slack=frozen(np.array([g - v for g, v in zip(inst.g, s.s)], dtype=object)),
        agent_slack=frozen(np.array([ONE - v for v in p], dtype=object)),
        nonnegative=all(v >= 0 for v in mech.a.flatten()),
        ex_post_ir_ok=mech.is_ex_post_ir_clean,
        redundant_ics=redundant_ic_pairs(inst.n),
        zero_tolerance=zero_tolerance)
    if report.violated_ics:
        logger.info('IC violated at {}'.format(report.violated_ics))
    return report


def mon_profile(inst, mech):
    """ Participation vector and whether it is non-increasing in type

        Returns:
            (numpy array, bool)
    """
    _check_dimensions(inst, mech)
    p = participation(mech)
    return p, all(p[i] >= p[i + 1] for i in range(len(p) - 1))


def classify_binding(inst, mech, zero_tolerance=ZERO):
    """ Partition all ordered IC pairs of a feasible mechanism

        Redundant pairs come first; the remaining pairs are binding when
        their slack is within ``zero_tolerance`` of zero and slack otherwise.

        Returns:
            :class:`BindingPartition`
    """
    report = feasibility_report(inst, mech, zero_tolerance=zero_tolerance)
    if not report.is_feasible:
        raise InfeasibleInput('classify_binding needs a feasible mechanism')
    n = inst.n
    redundant = report.redundant_ics
    binding, slack = set(), set()
    for i in range(n):
        for j in range(n):
            if i == j or (i, j) in redundant:
                continue
            if report.ic_slack[i, j] <= zero_tolerance:
                binding.add((i, j))
            else:
                slack.add((i, j))
    return BindingPartition(redundant, binding, slack)


def expand_common_lottery(inst, cl):
    """ a(x_k;theta_i) = c_k if i <= k else 0

        Raises:
            :class:`LotteryOverflow` when sum(c) > 1
    """
    if cl.n != inst.n:
        raise DimensionMismatch('lottery has {} entries, instance has N={}'.format(cl.n, inst.n))
    if cl.overflows:
        raise LotteryOverflow('cannot expand a lottery whose offers sum to {}'.format(
            format_rational(cl.total)))
    n = inst.n
    a = zeros((n, n))
    for k in range(n):
        for i in range(k + 1):
            a[k, i] = cl.c[k]
    return DirectMechanism(a)


def read_common_lottery(mech):
    """ Offer vector of a mechanism whose rows are constant over accepting types

        Returns:
            :class:`CommonLottery` or None when the rows are not constant
    """
    a = mech.a
    c = []
    for k in range(mech.n):
        row = set(a[k, i] for i in range(k + 1))
        if len(row) != 1:
            return None
        c.append(row.pop())
    return CommonLottery(c, allow_overflow=True)


def lottery_masses(inst, cl):
    """ s_k = D c_k F(theta_k)
    """
    return PositionMasses([inst.d * c * F for c, F in zip(cl.c, inst.F)])


def bundle_costs(mech, prices):
    """ Expenditure of every type at the given position prices

        Args:
            ``mech`` (:class:`DirectMechanism`): allocation
            ``prices`` (iterable): one price per position

        Returns:
            list of Fractions, one per type
    """
    p = rational_vector(prices, length=mech.n)
    return [sum((mech.a[k, i] * p[k] for k in range(mech.n)), ZERO) for i in range(mech.n)]


def mechanism_value(inst, mech, obj):
    return evaluate_objective(obj, position_masses(inst, mech))
