# -*- coding: utf-8 -*-
"""
.. module:: engine
   :platform: Unix
   :synopsis: Exception types raised by the workbench engine

"""


class WorkbenchError(Exception):
    """ Root of every error raised by the engine
    """


class MalformedInput(WorkbenchError, ValueError):
    """ Input could not be turned into a valid object
    """


class NonPositiveTypeMass(MalformedInput):
    pass


class PmfNotNormalized(MalformedInput):
    pass


class NegativeCapacity(MalformedInput):
    pass


class BadMass(MalformedInput):
    pass


class GridTooSmall(MalformedInput):
    pass


class DimensionMismatch(MalformedInput):
    pass


class UnknownGamma(MalformedInput):
    pass


class BadQuota(MalformedInput):
    pass


class IndexOutOfRange(WorkbenchError, IndexError):
    pass


class LotteryOverflow(WorkbenchError):
    """ Offer probabilities of a common lottery add up to more than one
    """


class InfeasibleInput(WorkbenchError):
    """ An operation that needs a feasible mechanism received an infeasible one
    """


class UnsupportedObjective(WorkbenchError):
    pass


class NotOptimal(WorkbenchError):
    pass


class InsufficientMass(WorkbenchError):
    pass


class BadIndices(WorkbenchError):
    pass


class InfeasibleMasses(WorkbenchError):
    pass


class CapsInfeasible(WorkbenchError):
    pass


class PreconditionViolation(WorkbenchError):
    """ A perturbation precondition failed

        Args:
            ``inequality`` (str): short name of the failed inequality
            ``detail`` (str): human readable description
    """

    def __init__(self, inequality, detail=''):
        super(PreconditionViolation, self).__init__(
            '{}: {}'.format(inequality, detail) if detail else inequality)
        self.inequality = inequality


class ConvexityHypothesisFailed(WorkbenchError):
    """ Some utility parametrization fails the convexity test

        Args:
            ``gammas`` (list(str)): names of the failing parametrizations
    """

    def __init__(self, gammas):
        super(ConvexityHypothesisFailed, self).__init__(
            'convexity fails for: {}'.format(', '.join(gammas)))
        self.gammas = list(gammas)
