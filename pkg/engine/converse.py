# -*- coding: utf-8 -*-
"""
.. module:: engine
   :platform: Unix
   :synopsis: Improving perturbations of common lotteries when 1/F is not convex

   A negative second difference of 1/F at position k lets a mean-preserving
   contraction on type i's offers (rows k-1, k, k+1), compensated across all
   accepting types, free agent mass without changing any position mass. The
   freed mass is then spent on an unfilled low position.
"""

from fractions import Fraction

from engine.base_objective import Linear
from engine.errors import PreconditionViolation, UnsupportedObjective
from engine.instance import convexity_report, fill_cost
from engine.mechanism import (DirectMechanism, PositionMasses, expand_common_lottery,
                              feasibility_report, mechanism_value, participation,
                              position_masses)
from engine.optimizer import greedy_masses, lottery_from_masses
from engine.rational import ONE, ZERO, format_rational, to_rational

import logging
logging.basicConfig()
logger = logging.getLogger('Converse-Search')
logger.setLevel(logging.INFO)

D_GRID_POINTS = 32
D_GRID_MAX_DENOMINATOR = 10 ** 6


def _second_difference(inst, k):
    F = inst.F
    return ONE / F[k - 1] - 2 / F[k] + ONE / F[k + 1]


def find_violation(inst):
    """ Smallest interior k where 1/F has a negative second difference, or None
    """
    report = convexity_report(inst)
    return report.violation_indices[0] if report.violation_indices else None


def _contraction_coefficients(inst, k, i):
    """ Change of every cell per unit of epsilon in the contraction stage
    """
    f_i, F = inst.f[i], inst.F
    coef = {}
    for row, weight in ((k - 1, 1), (k, -2), (k + 1, 1)):
        for j in range(row + 1):
            coef[(row, j)] = coef.get((row, j), ZERO) + weight * f_i / F[row]
    coef[(k - 1, i)] -= 1
    coef[(k, i)] += 2
    coef[(k + 1, i)] -= 1
    return coef


def _check_indices(inst, k, i):
    if not (0 < k < inst.n - 1 and 0 <= i < k):
        raise PreconditionViolation('indices', 'need 0 <= i < k and 0 < k < N-1, got k={}, i={}'
                                    .format(k, i))


def _check_support(a, k, i):
    cells = [(row, i) for row in (k - 1, k, k + 1) if a[row, i] <= 0]
    if cells:
        raise PreconditionViolation('support', 'cells {} of type {} are not positive'.format(cells, i))


def _epsilon_bounds(inst, a, k, i):
    """ Largest epsilon keeping cells in [0, 1], and largest keeping every P <= 1
    """
    coef = _contraction_coefficients(inst, k, i)
    cell_bound = None
    for (row, col), c in coef.items():
        if c < 0:
            bound = a[row, col] / -c
        elif c > 0:
            bound = (ONE - a[row, col]) / c
        else:
            continue
        cell_bound = bound if cell_bound is None else min(cell_bound, bound)
    p = participation(DirectMechanism(a))
    agent_bound = None
    for j in range(inst.n):
        dp = sum((c for (row, col), c in coef.items() if col == j), ZERO)
        if dp > 0:
            bound = (ONE - p[j]) / dp
            agent_bound = bound if agent_bound is None else min(agent_bound, bound)
    return cell_bound, agent_bound


def max_epsilon(inst, base, k, i):
    """ Largest contraction size for which every cell stays in [0, 1] and no type exceeds P = 1

        Args:
            ``inst`` (:class:`Instance`): instance
            ``base`` (:class:`CommonLottery`): lottery to perturb
            ``k`` (int): position with the negative second difference
            ``i`` (int): contracted type, i < k

        Returns:
            Fraction
    """
    _check_indices(inst, k, i)
    a = expand_common_lottery(inst, base).a
    bounds = [b for b in _epsilon_bounds(inst, a, k, i) if b is not None]
    return min(bounds) if bounds else ZERO


def full_allocation_cutoff(mech):
    """ Largest L such that every type j <= L is allocated with probability one, or None
    """
    p = participation(mech)
    cutoff = None
    for j, value in enumerate(p):
        if value != ONE:
            break
        cutoff = j
    return cutoff


def freed_mass(inst, k, i, epsilon):
    """ epsilon' = -epsilon f_i (1/F_{k-1} - 2/F_k + 1/F_{k+1}): participation freed for types below k
    """
    return -epsilon * inst.f[i] * _second_difference(inst, k)


def contraction(inst, base, k, i, epsilon):
    """ First stage: contraction on type i's row triple with compensation terms

        Position masses equal those of the expanded base lottery exactly.

        Raises:
            :class:`PreconditionViolation` ('indices', 'support', 'sign',
            'cell-bounds' or 'agent-slack')
    """
    _check_indices(inst, k, i)
    epsilon = to_rational(epsilon)
    if epsilon < 0:
        raise PreconditionViolation('sign', 'epsilon must be nonnegative')
    a = expand_common_lottery(inst, base).a
    _check_support(a, k, i)
    cell_bound, agent_bound = _epsilon_bounds(inst, a, k, i)
    if cell_bound is not None and epsilon > cell_bound:
        raise PreconditionViolation('cell-bounds', 'epsilon {} exceeds {}'.format(
            format_rational(epsilon), format_rational(cell_bound)))
    if agent_bound is not None and epsilon > agent_bound:
        raise PreconditionViolation('agent-slack', 'epsilon {} exceeds {}'.format(
            format_rational(epsilon), format_rational(agent_bound)))
    out = a.copy()
    for (row, col), c in _contraction_coefficients(inst, k, i).items():
        out[row, col] += epsilon * c
    return DirectMechanism(out)


def perturb(inst, base, k, i, epsilon, delta, fill_index):
    """ Improving perturbation of a common lottery

        Args:
            ``inst`` (:class:`Instance`): instance
            ``base`` (:class:`CommonLottery`): feasible common lottery
            ``k`` (int): interior position with negative second difference
            ``i`` (int): contracted type, i < k
            ``epsilon`` (Fraction): contraction size
            ``delta`` (Fraction): probability added to row ``fill_index``
            ``fill_index`` (int): unfilled position k' at or below the full-allocation cutoff

        Returns:
            :class:`DirectMechanism`; for Fill its value exceeds the base by D delta F(theta_k')

        Raises:
            :class:`PreconditionViolation` naming the failed inequality
    """
    delta = to_rational(delta)
    tilde = contraction(inst, base, k, i, epsilon)
    base_mech = expand_common_lottery(inst, base)
    assert position_masses(inst, tilde) == position_masses(inst, base_mech), \
        'contraction moved position masses'
    if delta < 0:
        raise PreconditionViolation('sign', 'delta must be nonnegative')
    allowance = freed_mass(inst, k, i, to_rational(epsilon))
    if delta > allowance:
        raise PreconditionViolation('agent-slack', 'delta {} exceeds epsilon\' = {}'.format(
            format_rational(delta), format_rational(allowance)))
    cutoff = full_allocation_cutoff(base_mech)
    if cutoff is None or not 0 <= fill_index <= cutoff:
        raise PreconditionViolation('indices', 'fill index {} above the full-allocation cutoff {}'
                                    .format(fill_index, cutoff))
    s = position_masses(inst, base_mech).s
    room = inst.g[fill_index] - s[fill_index]
    if room <= 0 or delta * inst.d * inst.F[fill_index] > room:
        raise PreconditionViolation('position-slack', 'position {} has room {}'.format(
            fill_index, format_rational(room)))

    a = tilde.a.copy()
    for j in range(fill_index + 1):
        a[fill_index, j] += delta
    hat = DirectMechanism(a)
    assert feasibility_report(inst, hat).is_feasible, 'perturbed mechanism is infeasible'
    return hat


class ImprovementSearch(object):
    """ Outcome of :func:`auto_improve`

        ``improvement`` is (mechanism, gain) or None; ``diagnostic`` says why
        nothing was found.
    """

    def __init__(self, improvement=None, diagnostic=None, **params):
        self.improvement = improvement
        self.diagnostic = diagnostic
        self.params = params

    @property
    def found(self):
        return self.improvement is not None

    def to_dict(self):
        out = {'found': self.found}
        if self.found:
            mech, gain = self.improvement
            out.update(mech.to_dict())
            out['gain'] = format_rational(gain)
            out.update({key: value if isinstance(value, int) else format_rational(value)
                        for key, value in self.params.items()})
        else:
            out['diagnostic'] = self.diagnostic
        return out


def mass_grid(inst, points=D_GRID_POINTS, max_denominator=D_GRID_MAX_DENOMINATOR):
    """ Geometric grid of agent masses from the cost of filling the top position to the cost of filling all
    """
    hi = fill_cost(inst)
    lo = inst.g[-1] if inst.g[-1] > 0 else hi / points
    grid = set()
    for t in range(points):
        value = float(lo) * (float(hi) / float(lo)) ** (t / float(points - 1))
        grid.add(Fraction(value).limit_denominator(max_denominator))
    return sorted(v for v in grid if v > 0)


def _try_mass(inst, obj):
    """ First improving perturbation at this agent mass, or a diagnostic string
    """
    if fill_cost(inst) <= inst.d:
        return None, 'full-fill feasible'
    weights = obj.weights_for(inst.n)
    base = lottery_from_masses(inst, PositionMasses(greedy_masses(inst, weights)))
    base_mech = expand_common_lottery(inst, base)
    cutoff = full_allocation_cutoff(base_mech)
    s = position_masses(inst, base_mech).s
    if cutoff is None:
        return None, 'no supported window'
    unfilled = [kk for kk in range(cutoff + 1) if s[kk] < inst.g[kk]]
    if not unfilled:
        return None, 'no supported window'
    fill_index = unfilled[0]
    for k in convexity_report(inst).violation_indices:
        for i in range(k):
            if any(base_mech.a[row, i] <= 0 for row in (k - 1, k, k + 1)):
                continue
            epsilon = max_epsilon(inst, base, k, i) / 2
            tilde = contraction(inst, base, k, i, epsilon)
            p = participation(tilde)
            delta = min([freed_mass(inst, k, i, epsilon),
                         (inst.g[fill_index] - s[fill_index]) / (inst.d * inst.F[fill_index])]
                        + [ONE - p[j] for j in range(fill_index + 1)])
            if delta <= 0:
                continue
            mech = perturb(inst, base, k, i, epsilon, delta, fill_index)
            gain = mechanism_value(inst, mech, obj) - mechanism_value(inst, base_mech, obj)
            assert gain > 0, 'perturbation did not improve the objective'
            params = {'D': inst.d, 'k': k, 'i': i, 'fill_index': fill_index,
                      'epsilon': epsilon, 'delta': delta}
            return ImprovementSearch((mech, gain), **params), None
    return None, 'no supported window'


def auto_improve(inst, obj, d=None, points=D_GRID_POINTS):
    """ Search for a mechanism strictly better than the best common lottery

        Args:
            ``inst`` (:class:`Instance`): instance
            ``obj`` (:class:`Linear` or :class:`Fill`): strictly increasing objective
            ``d`` (Fraction or None): agent mass to use; None searches the geometric grid
                and keeps the smallest improving mass
            ``points`` (int): size of the agent-mass grid

        Returns:
            :class:`ImprovementSearch`
    """
    if not isinstance(obj, Linear) or any(w <= 0 for w in obj.weights_for(inst.n)):
        raise UnsupportedObjective('auto_improve needs a strictly increasing linear objective')
    if convexity_report(inst).is_convex:
        return ImprovementSearch(diagnostic='1/F convex')
    masses = [to_rational(d)] if d is not None else mass_grid(inst, points=points)
    diagnostics = []
    for mass in masses:
        found, diagnostic = _try_mass(inst.with_mass(mass), obj)
        if found is not None:
            logger.info('Improvement {} at D = {}'.format(
                format_rational(found.improvement[1]), format_rational(mass)))
            return found
        diagnostics.append(diagnostic)
    if diagnostics and all(v == 'full-fill feasible' for v in diagnostics):
        return ImprovementSearch(diagnostic='full-fill feasible')
    return ImprovementSearch(diagnostic='no supported window')
