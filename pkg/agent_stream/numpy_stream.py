# -*- coding: utf-8 -*-
"""
.. module:: agent_stream
   :platform: Unix
   :synopsis: Seeded numpy market stream

"""

import numpy as np

from agent_stream.base_stream import BaseAgentStream
from engine.errors import BadQuota
from engine.rational import to_rational

import logging
logging.basicConfig()
logger = logging.getLogger('Agent-Stream')
logger.setLevel(logging.INFO)


class SeededAgentStream(BaseAgentStream):
    """ Markets of ``n_agents`` i.i.d. types from ``f`` with uniform priorities

        Draws depend only on the seed, so a replication can be re-run
        bit for bit from its spawned :class:`numpy.random.SeedSequence`.
    """

    def __init__(self, f, n_agents, seed, markets=1):
        """ Constructor

            Args:
                ``f`` (iterable): type pmf
                ``n_agents`` (int): agents per market
                ``seed`` (int or numpy SeedSequence): stream seed
                ``markets`` (int): number of markets before the stream ends
        """
        super(SeededAgentStream, self).__init__()
        if n_agents < 1:
            raise BadQuota('a market needs at least one agent, got {}'.format(n_agents))
        p = np.array([float(to_rational(v)) for v in f])
        self.p = p / p.sum()
        self.n_agents = int(n_agents)
        self.seed = seed
        self.markets = markets
        self.served = 0
        self.rng = None

    def initialize(self):
        """ Create the generator
        """
        self.rng = np.random.default_rng(self.seed)
        self.served = 0

    def next_batch(self):
        """ Returns an int array of type indices sorted by priority, or None when exhausted
        """
        if self.served >= self.markets:
            logger.debug('Stream finished after {} markets'.format(self.served))
            self.close()
            return None
        if self.rng is None:
            self.initialize()
        types = self.rng.choice(len(self.p), size=self.n_agents, p=self.p)
        order = self.rng.permutation(self.n_agents)
        self.served += 1
        return types[order]

    def close(self):
        self.rng = None
