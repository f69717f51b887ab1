# -*- coding: utf-8 -*-
"""
.. module:: engine
   :platform: Unix
   :synopsis: Capped random priority: continuum thresholds and finite-market Monte Carlo

   Preferences are vertical: every agent ranks positions by quality and
   accepts a position iff it is at least his outside option. Positions are
   therefore exhausted from the top down, and a type-i agent holding a
   priority between two consecutive cutoffs receives the position exhausted
   at the later one, if he accepts it.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.stats import linregress

from agent_stream import SeededAgentStream
from engine.errors import BadQuota, CapsInfeasible, DimensionMismatch
from engine.mechanism import DirectMechanism, PositionMasses
from engine.rational import ZERO, format_rational, rational_vector, vector_to_strings, zeros

import logging
logging.basicConfig()
logger = logging.getLogger('Capped-Random-Priority')
logger.setLevel(logging.INFO)

CRP_WORKERS = 4


class CrpResult(object):
    """ Continuum outcome of capped random priority

        ``thresholds`` holds (step m, cutoff t*(m), exhausted position k);
        cutoffs are measured in agent mass, so the last one is at most D.
    """

    def __init__(self, thresholds, allocation, caps):
        self.thresholds = thresholds
        self.allocation = allocation
        self.caps = caps

    @property
    def cutoffs(self):
        return [t for _, t, _ in self.thresholds]

    def to_dict(self):
        out = {'thresholds': [[m, format_rational(t), k] for m, t, k in self.thresholds],
               'caps': vector_to_strings(self.caps.s)}
        out.update(self.allocation.to_dict())
        return out


def _check_caps(inst, caps):
    s = rational_vector(getattr(caps, 's', caps))
    if len(s) != inst.n:
        raise DimensionMismatch('caps have {} entries, instance has N={}'.format(len(s), inst.n))
    bad = [k for k in range(inst.n) if s[k] < 0 or s[k] > inst.g[k]]
    if bad:
        raise CapsInfeasible('caps outside [0, g] at positions {}'.format(bad))
    return PositionMasses(s)


def continuum_crp(inst, caps):
    """ Sequential exhaustion of capped positions by a continuum of agents

        Args:
            ``inst`` (:class:`Instance`): instance
            ``caps`` (iterable or PositionMasses): quotas s_k <= g_k

        Returns:
            :class:`CrpResult`

        Raises:
            :class:`CapsInfeasible` when a cap is negative or above capacity
    """
    caps = _check_caps(inst, caps)
    n, d = inst.n, inst.d
    a = zeros((n, n))
    thresholds = []
    used = ZERO
    for k in range(n - 1, -1, -1):
        if caps.s[k] == 0:
            continue
        needed = caps.s[k] / inst.F[k]
        share = min(needed, d - used)
        for i in range(k + 1):
            a[k, i] = share / d
        used += share
        thresholds.append((len(thresholds) + 1, used, k))
        if used == d:
            break
    logger.debug('CRP cutoffs: {}'.format(vector_to_strings(t for _, t, _ in thresholds)))
    return CrpResult(thresholds, DirectMechanism(a), caps)


def caps_from_lottery(inst, cl):
    """ s_k = D c_k F(theta_k)
    """
    return PositionMasses([inst.d * c * F for c, F in zip(cl.c, inst.F)])


def random_priority(inst):
    """ Uncapped random priority: every position capped at its capacity
    """
    return continuum_crp(inst, inst.g)


def quotas(inst, caps, n_agents):
    """ Integer quotas floor(n s_k / D); remainders go to no one
    """
    caps = _check_caps(inst, caps)
    return np.array([math.floor(n_agents * s / inst.d) for s in caps.s], dtype=np.int64)


def serial_dictatorship(types, quota, n_positions):
    """ Run vertical serial dictatorship on one market

        Args:
            ``types`` (numpy int array): type indices in priority order
            ``quota`` (numpy int array): seats per position
            ``n_positions`` (int): N

        Returns:
            N x N int array of winner counts, row = position, column = type
    """
    wins = np.zeros((n_positions, n_positions), dtype=np.int64)
    pointer = 0
    for k in range(n_positions - 1, -1, -1):
        if quota[k] == 0 or pointer >= len(types):
            continue
        rest = types[pointer:]
        takers = np.flatnonzero(rest <= k)[:quota[k]]
        wins[k] += np.bincount(rest[takers], minlength=n_positions)
        if len(takers) == quota[k]:
            pointer += int(takers[-1]) + 1
        else:
            pointer = len(types)
    return wins


class SimulationResult(object):
    """ Pooled Monte Carlo allocation with binomial standard errors
    """

    def __init__(self, wins, counts, analytic, per_replication_deviation, n_agents, seed):
        self.wins = wins
        self.counts = counts
        self.analytic = analytic
        self.per_replication_deviation = per_replication_deviation
        self.n_agents = n_agents
        self.seed = seed
        with np.errstate(divide='ignore', invalid='ignore'):
            self.empirical = np.where(counts > 0, wins / np.maximum(counts, 1), 0.0)
            self.stderr = np.where(counts > 0,
                                   np.sqrt(self.empirical * (1.0 - self.empirical)
                                           / np.maximum(counts, 1)), 0.0)

    @property
    def replications(self):
        return len(self.per_replication_deviation)

    @property
    def mean_deviation(self):
        return float(np.mean(self.per_replication_deviation))

    def rows(self):
        """ (k, i, empirical, stderr, analytic) for every accepting cell k >= i
        """
        n = self.analytic.shape[0]
        return [(k, i, float(self.empirical[k, i]), float(self.stderr[k, i]),
                 float(self.analytic[k, i])) for k in range(n) for i in range(k + 1)]

    def to_dict(self):
        return {'n_agents': self.n_agents, 'replications': self.replications, 'seed': self.seed,
                'mean_max_deviation': self.mean_deviation,
                'rows': [list(r) for r in self.rows()]}


def simulate_finite(inst, caps, n_agents, replications, seed, workers=CRP_WORKERS):
    """ Monte Carlo of capped random priority in a market of ``n_agents``

        Each replication draws its own market from a child of
        ``SeedSequence(seed)``, so results depend only on ``seed``.

        Args:
            ``inst`` (:class:`Instance`): instance
            ``caps`` (iterable or PositionMasses): continuum quotas
            ``n_agents`` (int): agents per market
            ``replications`` (int): independent markets
            ``seed`` (int): 64-bit seed
            ``workers`` (int): replication threads

        Returns:
            :class:`SimulationResult`

        Raises:
            :class:`BadQuota` for non-positive sizes
    """
    if n_agents < 1 or replications < 1:
        raise BadQuota('need n_agents >= 1 and replications >= 1, got {} and {}'.format(
            n_agents, replications))
    n = inst.n
    quota = quotas(inst, caps, n_agents)
    analytic = np.array(continuum_crp(inst, caps).allocation.a, dtype=float)
    children = np.random.SeedSequence(seed).spawn(replications)

    def replicate(child):
        stream = SeededAgentStream(inst.f, n_agents, child)
        stream.initialize()
        types = stream.next_batch()
        stream.close()
        wins = serial_dictatorship(types, quota, n)
        counts = np.bincount(types, minlength=n)
        with np.errstate(divide='ignore', invalid='ignore'):
            share = np.where(counts > 0, wins / np.maximum(counts, 1), analytic)
        mask = np.tril(np.ones((n, n), dtype=bool))
        return wins, counts, float(np.max(np.abs(share - analytic)[mask]))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(replicate, children))
    wins = sum(o[0] for o in outcomes)
    counts = sum(o[1] for o in outcomes)
    result = SimulationResult(wins, np.broadcast_to(counts, (n, n)), analytic,
                              [o[2] for o in outcomes], n_agents, seed)
    logger.info('Simulated {} markets of {} agents, mean max deviation {:.3g}'.format(
        replications, n_agents, result.mean_deviation))
    return result


class SlopeFit(object):
    """ Least-squares fit of log(deviation) on log(n)
    """

    def __init__(self, sizes, deviations, slope, intercept, rvalue):
        self.sizes = sizes
        self.deviations = deviations
        self.slope = slope
        self.intercept = intercept
        self.rvalue = rvalue

    def to_dict(self):
        return {'sizes': list(self.sizes), 'deviations': list(self.deviations),
                'slope': self.slope, 'intercept': self.intercept, 'rvalue': self.rvalue}


def convergence_slope(inst, caps, sizes=(1000, 10000, 100000), replications=20, seed=0,
                      workers=CRP_WORKERS):
    """ Log-log slope of the mean per-replication max-entry deviation against market size
    """
    deviations = [simulate_finite(inst, caps, n_agents, replications, seed + step,
                                  workers=workers).mean_deviation
                  for step, n_agents in enumerate(sizes)]
    fit = linregress(np.log(sizes), np.log(deviations))
    logger.info('Convergence slope {:.3f}'.format(fit.slope))
    return SlopeFit(sizes, deviations, float(fit.slope), float(fit.intercept), float(fit.rvalue))
