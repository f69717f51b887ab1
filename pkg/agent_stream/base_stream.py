# -*- coding: utf-8 -*-
"""
.. module:: agent_stream
   :platform: Unix
   :synopsis: Base class for streams of simulated markets

"""

import abc


class BaseAgentStream(object, metaclass=abc.ABCMeta):
    """ Inherit from this class to build your market provider
    """

    def __init__(self):
        """ Constructor
        """
        super(BaseAgentStream, self).__init__()

    def initialize(self):
        """ Perform any initialization
        """
        raise NotImplementedError("Not implemented yet.")

    def next_batch(self):
        """ Returns the type indices of the next market, in priority order
        """
        raise NotImplementedError("Not implemented yet.")

    def close(self):
        """ Release resources
        """
        pass
