# -*- coding: utf-8 -*-
"""
.. module:: engine
   :platform: Unix
   :synopsis: The designer's LP, the min-mass LP and their dual certificates

   IC rows are written ``-IC_{i,j} <= 0`` with the IC expression scaled by
   (N-1), i.e. with integer weights (k - i). Only cells with k >= i are
   variables, which imposes ex-post IR structurally.

   The min-mass program substitutes y[k][i] = D a(x_k;theta_i). IC rows are
   positively homogeneous, so they hold for y exactly when they hold for a;
   position rows become sum_i f_i y[k][i] >= s_k and agent rows
   sum_k y[k][i] <= D. For D > 0 the substitution is a bijection, which
   makes the linearization exact.
"""

from fractions import Fraction

from engine.errors import MalformedInput, NotOptimal
from engine.lpsolve import (GE, LE, LinearProgram, complementary_slackness_violations, dual_value,
                            lagrange_multipliers, simplex_solve)
from engine.mechanism import DirectMechanism, mechanism_value
from engine.rational import ONE, ZERO, format_rational, vector_to_strings, zeros
from engine.transform import multipliers

import logging
logging.basicConfig()
logger = logging.getLogger('Designer-LP')
logger.setLevel(logging.INFO)


def cell_name(prefix, k, i):
    return '{}[{}][{}]'.format(prefix, k, i)


def _add_ic_rows(lp, n, prefix):
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            row = {}
            for k in range(i + 1, n):
                row[cell_name(prefix, k, i)] = row.get(cell_name(prefix, k, i), 0) - (k - i)
                if k >= j:
                    row[cell_name(prefix, k, j)] = row.get(cell_name(prefix, k, j), 0) + (k - i)
            lp.add_constraint('IC[{}][{}]'.format(i, j), row, LE, 0)


def build_designer_lp(inst, obj):
    """ Designer's problem for a linear objective

        Args:
            ``inst`` (:class:`Instance`): instance
            ``obj`` (:class:`Linear` or :class:`Fill`): objective

        Returns:
            :class:`LinearProgram` with variables a[k][i] (k >= i) and rows
            IC[i][j], POS[k], AGE[i]

        Raises:
            :class:`UnsupportedObjective` for non-linear objectives
    """
    n = inst.n
    weights = obj.weights_for(n)
    lp = LinearProgram(sense='max', name='designer', kind='designer')
    for k in range(n):
        for i in range(k + 1):
            lp.add_variable(cell_name('a', k, i), cost=weights[k] * inst.d * inst.f[i])
    _add_ic_rows(lp, n, 'a')
    for k in range(n):
        lp.add_constraint('POS[{}]'.format(k),
                          {cell_name('a', k, i): inst.d * inst.f[i] for i in range(k + 1)},
                          LE, inst.g[k])
    for i in range(n):
        lp.add_constraint('AGE[{}]'.format(i), {cell_name('a', k, i): 1 for k in range(i, n)},
                          LE, 1)
    logger.debug('Designer LP: {} variables, {} rows'.format(lp.n_variables, lp.n_constraints))
    return lp


def build_min_mass_lp(inst, targets):
    """ Least agent mass reaching target position masses

        Args:
            ``inst`` (:class:`Instance`): instance (its D is ignored)
            ``targets`` (iterable or PositionMasses): target masses s_k >= 0

        Returns:
            :class:`LinearProgram` minimizing variable "D"
    """
    n = inst.n
    s = [Fraction(v) for v in getattr(targets, 's', targets)]
    if len(s) != n or any(v < 0 for v in s):
        raise MalformedInput('targets must be {} nonnegative masses'.format(n))
    lp = LinearProgram(sense='min', name='min_mass', kind='min_mass')
    for k in range(n):
        for i in range(k + 1):
            lp.add_variable(cell_name('y', k, i))
    lp.add_variable('D', cost=1)
    _add_ic_rows(lp, n, 'y')
    for k in range(n):
        lp.add_constraint('POS[{}]'.format(k),
                          {cell_name('y', k, i): inst.f[i] for i in range(k + 1)}, GE, s[k])
    for i in range(n):
        row = {cell_name('y', k, i): 1 for k in range(i, n)}
        row['D'] = -1
        lp.add_constraint('AGE[{}]'.format(i), row, LE, 0)
    return lp


def mechanism_from_solution(n, solution, prefix='a', scale=ONE):
    """ Read cells prefix[k][i] of a solved LP into a mechanism, divided by ``scale``
    """
    a = zeros((n, n))
    for k in range(n):
        for i in range(k + 1):
            a[k, i] = solution.primal[cell_name(prefix, k, i)] / scale
    return DirectMechanism(a)


def solve_designer(inst, obj):
    """ Optimal mechanism for a linear objective

        Returns:
            (:class:`DirectMechanism`, Fraction value)

        Raises:
            :class:`NotOptimal` if the LP is not solved to optimality
    """
    lp = build_designer_lp(inst, obj)
    solution = simplex_solve(lp)
    if not solution.is_optimal:
        raise NotOptimal('designer LP ended {}'.format(solution.status))
    mech = mechanism_from_solution(inst.n, solution)
    value = solution.value
    assert mechanism_value(inst, mech, obj) == value, 'LP value and mechanism value disagree'
    logger.info('Designer optimum {} for {}'.format(format_rational(value), obj))
    return mech, value


class MinMassResult(object):
    """ Solved min-mass LP: least mass and the mechanism attaining it
    """

    def __init__(self, lp, solution, mechanism, mass):
        self.lp = lp
        self.solution = solution
        self.mechanism = mechanism
        self.mass = mass

    def to_dict(self):
        out = {'D': format_rational(self.mass), 'status': self.solution.status}
        if self.mechanism is not None:
            out.update(self.mechanism.to_dict())
        return out


def solve_min_mass(inst, targets):
    """ Solve the min-mass LP and recover a = y / D*

        For zero targets the least mass is 0 and no mechanism is recovered.
    """
    lp = build_min_mass_lp(inst, targets)
    solution = simplex_solve(lp)
    if not solution.is_optimal:
        raise NotOptimal('min-mass LP ended {}'.format(solution.status))
    mass = solution.value
    mechanism = None
    if mass > 0:
        mechanism = mechanism_from_solution(inst.n, solution, prefix='y', scale=mass)
    return MinMassResult(lp, solution, mechanism, mass)


class DualCertificate(object):
    """ Multipliers of a solved designer or min-mass LP.

        ``pos``/``age``/``ic`` hold nonnegative Lagrange multipliers. For the
        min-mass LP they are also reported in the normalization that fixes
        the agent mass (``pos_scaled`` = D* times the multiplier), where the
        convex-case closed forms read D*/F(theta_k) and D*.
    """

    def __init__(self, **kw):
        self.__dict__.update(kw)

    def to_dict(self):
        out = {'kind': self.kind,
               'pos': vector_to_strings(self.pos),
               'age': vector_to_strings(self.age),
               'ic': {'{},{}'.format(i, j): format_rational(v) for (i, j), v in sorted(self.ic.items())
                      if v != 0},
               'complementary_slackness_ok': self.complementary_slackness_ok,
               'violations': list(self.violations),
               'strong_duality_ok': self.strong_duality_ok,
               'closed_form_valid': self.closed_form_valid}
        if self.kind == 'min_mass':
            out.update({'pos_scaled': vector_to_strings(self.pos_scaled),
                        'age_scaled': vector_to_strings(self.age_scaled),
                        'closed_form_pos': vector_to_strings(self.closed_form_pos),
                        'closed_form_age': format_rational(self.closed_form_age),
                        'pos_matches_closed_form': self.pos_matches_closed_form,
                        'value_matches_closed_form': self.value_matches_closed_form})
        return out


def dual_certificate(inst, lp, solution):
    """ Multiplier report keyed by POS_k, AGE_i and IC_{i,j}

        Args:
            ``inst`` (:class:`Instance`): instance the LP was built from
            ``lp`` (:class:`LinearProgram`): designer or min-mass LP
            ``solution`` (:class:`LpSolution`): its optimal solution

        Returns:
            :class:`DualCertificate`

        Raises:
            :class:`NotOptimal` when ``solution`` is not optimal
    """
    if not solution.is_optimal:
        raise NotOptimal('no certificate for a {} LP'.format(solution.status))
    n = inst.n
    lam = lagrange_multipliers(lp, solution)
    pos = [lam['POS[{}]'.format(k)] for k in range(n)]
    age = [lam['AGE[{}]'.format(i)] for i in range(n)]
    ic = {(i, j): lam['IC[{}][{}]'.format(i, j)] for i in range(n) for j in range(n) if i != j}
    violations = complementary_slackness_violations(lp, solution)
    conjecture = multipliers(inst)
    cert = DualCertificate(kind=lp.kind, pos=pos, age=age, ic=ic,
                           complementary_slackness_ok=not violations, violations=violations,
                           strong_duality_ok=dual_value(lp, solution) == solution.value,
                           closed_form_valid=conjecture.all_nonnegative)
    if lp.kind == 'min_mass':
        mass = solution.value
        targets = [lp.rhs[lp.constraint_names.index('POS[{}]'.format(k))] for k in range(n)]
        cert.pos_scaled = [mass * v for v in pos]
        cert.age_scaled = [mass * v for v in age]
        cert.closed_form_pos = [mass / F for F in inst.F]
        cert.closed_form_age = mass
        cert.pos_matches_closed_form = cert.pos_scaled == cert.closed_form_pos
        cert.value_matches_closed_form = sum((s / F for s, F in zip(targets, inst.F)), ZERO) == mass
    if not cert.closed_form_valid:
        logger.info('Conjectured multipliers have negative entries; closed form rejected')
    return cert
