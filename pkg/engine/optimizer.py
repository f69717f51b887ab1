# -*- coding: utf-8 -*-
"""
.. module:: engine
   :platform: Unix
   :synopsis: Optimal common lotteries: greedy fill, budget greedy and KKT water-filling

   Over common lotteries the designer's problem is a budget problem in the
   position masses: sum_k s_k / F(x_k) <= D with 0 <= s_k <= g_k. It is
   optimal over all mechanisms when 1/F is convex.
"""

import math

import numpy as np
from scipy.optimize import bisect
from scipy.special import logsumexp

from engine.base_objective import Linear, SeparableConcave
from engine.errors import InfeasibleMasses, UnsupportedObjective
from engine.instance import convexity_report
from engine.mechanism import CommonLottery, PositionMasses
from engine.rational import ONE, ZERO, rationalize

import logging
logging.basicConfig()
logger = logging.getLogger('Lottery-Optimizer')
logger.setLevel(logging.INFO)

BISECTION_XTOL = 1e-14
KKT_TOL = 1e-10


def fill_quantities(inst):
    """ q_k = g(x_k) / (D F(x_k)): offer probability that exactly fills x_k
    """
    return [g / (inst.d * F) for g, F in zip(inst.g, inst.F)]


def optimal_lottery_fill(inst):
    """ Greedy fill from the top position down

        c_k = min{q_k, 1 - Q_k} with Q_k = min{1, sum_{k'>k} q_k'}

        Returns:
            :class:`CommonLottery`
    """
    q = fill_quantities(inst)
    c = []
    for k in range(inst.n):
        above = min(ONE, sum(q[k + 1:], ZERO))
        c.append(min(q[k], ONE - above))
    return CommonLottery(c)


class ShrinkingLottery(object):
    """ The common lottery pi with its cutoff index
    """

    def __init__(self, lottery, cutoff):
        self.lottery = lottery
        self.cutoff = cutoff

    def to_dict(self):
        out = self.lottery.to_dict()
        out['cutoff'] = self.cutoff
        return out


def shrinking_lottery(inst):
    """ pi(x_k) = q_k above the cutoff, the remaining probability at it, zero below

        The cutoff is the smallest k' with sum_{k>k'} q_k <= 1 <= sum_{k>=k'} q_k,
        or 0 when no such index exists.
    """
    q = fill_quantities(inst)
    n = inst.n
    cutoff = next((kk for kk in range(n)
                   if sum(q[kk + 1:], ZERO) <= ONE <= sum(q[kk:], ZERO)), 0)
    above = sum(q[cutoff + 1:], ZERO)
    pi = [ZERO] * n
    for k in range(cutoff + 1, n):
        pi[k] = q[k]
    pi[cutoff] = min(q[cutoff], ONE - above)
    return ShrinkingLottery(CommonLottery(pi), cutoff)


def _warn_if_not_convex(inst):
    report = convexity_report(inst)
    if not report.is_convex:
        logger.warning('1/F is not convex at {}; result is the best common lottery only'.format(
            report.violation_indices))
    return report.is_convex


def greedy_masses(inst, weights):
    """ Fractional knapsack on the budget sum s_k/F_k <= D, by alpha_k F_k descending
    """
    n = inst.n
    order = sorted(range(n), key=lambda k: (-weights[k] * inst.F[k], k))
    budget = inst.d
    s = [ZERO] * n
    for k in order:
        if weights[k] <= 0 or budget <= 0:
            continue
        s[k] = min(inst.g[k], budget * inst.F[k])
        budget -= s[k] / inst.F[k]
    return s


def water_fill(alpha, F, d, rho, caps=None, xtol=BISECTION_XTOL):
    """ Maximize sum alpha_k s_k^rho subject to sum s_k/F_k <= d and 0 <= s_k <= caps_k

        Positions with alpha_k = 0 are excluded (left at zero). Interior
        positions satisfy rho alpha_k s_k^(rho-1) = lambda / F_k; lambda is
        located by bisection on log(lambda), then recomputed in closed form
        for the final active set.

        Args:
            ``alpha`` (iterable): weights
            ``F`` (iterable): cdf values (prices are 1/F)
            ``d`` (float): budget (agent mass)
            ``rho`` (float): exponent in (0, 1)
            ``caps`` (iterable or None): capacities, None for unbounded
            ``xtol`` (float): bisection interval width

        Returns:
            (numpy float array of masses, float lambda)
    """
    alpha = np.array([float(v) for v in alpha])
    F = np.array([float(v) for v in F])
    d = float(d)
    rho = float(rho)
    inv = 1.0 / (1.0 - rho)
    active = alpha > 0
    n = len(alpha)
    if not active.any() or d <= 0:
        return np.zeros(n), 0.0
    log_cost = np.full(n, -np.inf)
    log_cost[active] = np.log(rho * alpha[active] * F[active])
    if caps is not None:
        caps = np.array([float(v) for v in caps])
        with np.errstate(divide='ignore'):
            log_caps = np.log(caps)
        if np.sum(np.where(active, caps, 0.0) / F) <= d:
            return np.where(active, caps, 0.0), 0.0

    def unclamped(t):
        with np.errstate(all='ignore'):
            return np.where(active, (log_cost - t) * inv, -np.inf)

    def masses(t):
        expo = unclamped(t)
        if caps is not None:
            expo = np.minimum(expo, log_caps)
        with np.errstate(all='ignore'):
            return np.where(active, np.exp(expo), 0.0)

    def excess(t):
        return float(np.sum(masses(t) / F)) - d

    lo, hi = -1.0, 1.0
    for _ in range(2000):
        if excess(lo) >= 0:
            break
        lo *= 2.0
    for _ in range(2000):
        if excess(hi) <= 0:
            break
        hi *= 2.0
    t = bisect(excess, lo, hi, xtol=xtol, maxiter=1000)
    s = masses(t)

    capped = np.zeros(n, dtype=bool) if caps is None else active & (unclamped(t) >= log_caps)
    interior = active & ~capped
    remaining = d - (float(np.sum(caps[capped] / F[capped])) if caps is not None else 0.0)
    if interior.any() and remaining > 0:
        log_lam = (1.0 - rho) * (logsumexp(log_cost[interior] * inv - np.log(F[interior]))
                                 - math.log(remaining))
        polished = s.copy()
        with np.errstate(all='ignore'):
            polished[interior] = np.exp((log_cost[interior] - log_lam) * inv)
        if caps is None or np.all(polished[interior] <= caps[interior]):
            s, t = polished, log_lam
    logger.debug('Water level log(lambda) = {}'.format(t))
    return s, math.exp(t)


def optimal_masses(inst, obj, xtol=BISECTION_XTOL):
    """ Optimal position masses over common lotteries

        Fill and Linear objectives use the exact greedy; SeparableConcave uses
        water-filling in floating point. A warning is logged when 1/F is not
        convex, since the result is then only the best common lottery.

        Returns:
            :class:`PositionMasses` (exact for linear objectives)
    """
    _warn_if_not_convex(inst)
    if isinstance(obj, Linear):
        return PositionMasses(greedy_masses(inst, obj.weights_for(inst.n)))
    if isinstance(obj, SeparableConcave):
        s, lam = water_fill(obj.weights, inst.F, inst.d, obj.rho, caps=inst.g, xtol=xtol)
        logger.info('Water-filling multiplier {:.6g}'.format(lam))
        return PositionMasses(s, exact=False)
    raise UnsupportedObjective('no optimizer for {}'.format(type(obj).__name__))


def optimal_masses_flexible(inst, obj, xtol=BISECTION_XTOL):
    """ Water-filling without capacities (every g_k unbounded); the budget binds
    """
    if not isinstance(obj, SeparableConcave):
        raise UnsupportedObjective('flexible capacity needs a SeparableConcave objective')
    s, lam = water_fill(obj.weights, inst.F, inst.d, obj.rho, caps=None, xtol=xtol)
    return PositionMasses(s, exact=False)


def lottery_from_masses(inst, masses, max_denominator=10 ** 12):
    """ c_k = s_k / (D F_k); floating masses are rationalized for reporting
    """
    if masses.exact:
        c = [s / (inst.d * F) for s, F in zip(masses.s, inst.F)]
    else:
        c = [rationalize(s, max_denominator) / (inst.d * F) for s, F in zip(masses.s, inst.F)]
    return CommonLottery(c, allow_overflow=not masses.exact)


def optimal_common_lottery(inst, obj):
    return lottery_from_masses(inst, optimal_masses(inst, obj))


class KktReport(object):
    """ Outcome of the KKT certificate search for a water-filling solution

        ``violations`` lists (k, case) with case one of 'interior',
        'zero', 'capacity' or 'budget'.
    """

    def __init__(self, passed, lam, violations, budget_used):
        self.passed = passed
        self.lam = lam
        self.violations = violations
        self.budget_used = budget_used

    def to_dict(self):
        return {'passed': self.passed, 'lambda': self.lam,
                'violations': [list(v) for v in self.violations],
                'budget_used': self.budget_used}


def kkt_check(inst, obj, s, tol=KKT_TOL, flexible=False):
    """ Look for lambda >= 0 certifying optimality of ``s``

        Cases per position with positive weight: (i) 0 < s_k < g_k needs
        V_k'(s_k) = lambda/F_k; (ii) s_k = 0 needs V_k'(0+) <= lambda/F_k;
        (iii) s_k = g_k needs V_k'(g_k) >= lambda/F_k. Complementary
        slackness: lambda = 0 unless the budget binds.

        Args:
            ``inst`` (:class:`Instance`): instance
            ``obj`` (:class:`SeparableConcave`): objective
            ``s`` (iterable or PositionMasses): masses to certify
            ``tol`` (float): relative tolerance
            ``flexible`` (bool): ignore capacities

        Returns:
            :class:`KktReport`

        Raises:
            :class:`InfeasibleMasses` when ``s`` leaves the budget set
    """
    if not isinstance(obj, SeparableConcave):
        raise UnsupportedObjective('KKT certificates are for SeparableConcave objectives')
    s = np.array([float(v) for v in getattr(s, 's', s)])
    F = np.array([float(v) for v in inst.F])
    g = np.full(inst.n, np.inf) if flexible else np.array([float(v) for v in inst.g])
    d = float(inst.d)
    budget = float(np.sum(s / F))
    scale = max(1.0, d)
    if np.any(s < -tol) or np.any(s > g + tol) or budget > d + tol * scale:
        raise InfeasibleMasses('masses {} leave the budget set'.format(list(s)))

    active = [k for k in range(inst.n) if obj.weights[k] > 0]
    capped = [k for k in active if np.isfinite(g[k]) and s[k] >= g[k] - tol * max(1.0, g[k])]
    zero = [k for k in active if s[k] <= 0.0 and k not in capped]
    interior = [k for k in active if k not in capped and k not in zero]
    priced = {k: F[k] * obj.marginal(k, s[k]) for k in active}

    if budget < d - tol * scale:
        lam = 0.0
    elif interior:
        lam = float(np.mean([priced[k] for k in interior]))
    elif capped:
        lam = min(priced[k] for k in capped)
    else:
        lam = 0.0

    violations = []
    for k in active:
        band = tol * max(1.0, lam)
        if k in interior and abs(priced[k] - lam) > band:
            violations.append((k, 'interior'))
        elif k in zero and priced[k] > lam + band:
            violations.append((k, 'zero'))
        elif k in capped and priced[k] < lam - band:
            violations.append((k, 'capacity'))
    if lam > 0 and abs(d - budget) > tol * scale:
        violations.append((-1, 'budget'))
    if violations:
        logger.info('KKT violations: {}'.format(violations))
    return KktReport(not violations, lam, violations, budget)
