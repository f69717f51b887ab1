# -*- coding: utf-8 -*-
"""
.. module:: engine
   :platform: Unix
   :synopsis: Designer objectives over position masses and the base objective class

"""

import abc
import math
from fractions import Fraction

from engine.errors import DimensionMismatch, MalformedInput, UnsupportedObjective
from engine.rational import ZERO, format_rational, to_rational, vector_to_strings


class BaseObjective(object, metaclass=abc.ABCMeta):
    """ Base class for designer value functions V(s).

        Inherit from this class to plug a custom value function into the
        checker; only :class:`Fill`, :class:`Linear` and
        :class:`SeparableConcave` are understood by the optimizers.
    """

    kind = None

    def __init__(self, **kw):
        """ Constructor
        """
        super(BaseObjective, self).__init__()

    def evaluate(self, s):
        """ Value of the position-mass vector ``s``
        """
        raise NotImplementedError("Not implemented yet.")

    def marginal(self, k, s_k):
        """ Derivative of the k-th separable component at ``s_k``
        """
        raise NotImplementedError("Not implemented yet.")

    @property
    def is_linear(self):
        return False

    def weights_for(self, n):
        """ Linear weights on N positions, for LP builders
        """
        raise UnsupportedObjective('{} is not a linear objective'.format(type(self).__name__))

    def to_dict(self):
        raise NotImplementedError("Not implemented yet.")

    def check_positions(self, n):
        """ Raise :class:`DimensionMismatch` unless the weights cover ``n`` positions
        """
        weights = getattr(self, 'weights', None)
        if weights is not None and len(weights) != n:
            raise DimensionMismatch('objective has {} weights, instance has {} positions'.format(
                len(weights), n))

    def _check_length(self, s):
        weights = getattr(self, 'weights', None)
        if weights is not None and len(weights) != len(s):
            raise DimensionMismatch('objective has {} weights, masses have {} entries'.format(
                len(weights), len(s)))


class Linear(BaseObjective):
    """ V(s) = sum_k alpha_k s_k
    """

    kind = 'linear'

    def __init__(self, weights):
        """ Constructor

            Args:
                ``weights`` (iterable): one rational weight per position
        """
        super(Linear, self).__init__()
        self.weights = tuple(to_rational(w) for w in weights)
        if not self.weights:
            raise MalformedInput('linear objective needs at least one weight')

    @property
    def is_linear(self):
        return True

    def weights_for(self, n):
        self.check_positions(n)
        return self.weights

    def evaluate(self, s):
        self._check_length(s)
        return sum((w * v for w, v in zip(self.weights, s)), ZERO)

    def marginal(self, k, s_k):
        return self.weights[k]

    def to_dict(self):
        return {'kind': self.kind, 'weights': vector_to_strings(self.weights)}

    def __repr__(self):
        return 'Linear({})'.format(vector_to_strings(self.weights))


class Fill(Linear):
    """ Total allocated mass; equivalent to Linear with all-ones weights
    """

    kind = 'fill'

    def __init__(self, n=None):
        BaseObjective.__init__(self)
        self.weights = None if n is None else tuple(Fraction(1) for _ in range(n))

    def weights_for(self, n):
        return tuple(Fraction(1) for _ in range(n))

    def evaluate(self, s):
        return sum(s, ZERO)

    def marginal(self, k, s_k):
        return Fraction(1)

    def to_dict(self):
        return {'kind': self.kind}

    def __repr__(self):
        return 'Fill()'


class SeparableConcave(BaseObjective):
    """ V(s) = sum_k alpha_k s_k^rho with 0 < rho < 1, evaluated in floating point
    """

    kind = 'concave'

    def __init__(self, weights, rho):
        """ Constructor

            Args:
                ``weights`` (iterable): nonnegative weights alpha_k
                ``rho`` (rational): curvature exponent in (0, 1)
        """
        super(SeparableConcave, self).__init__()
        self.weights = tuple(to_rational(w) for w in weights)
        self.rho = to_rational(rho)
        if not self.weights:
            raise MalformedInput('concave objective needs at least one weight')
        if not 0 < self.rho < 1:
            raise MalformedInput('rho must lie in (0, 1), got {}'.format(format_rational(self.rho)))
        if any(w < 0 for w in self.weights):
            raise MalformedInput('concave weights must be nonnegative')

    def evaluate(self, s):
        self._check_length(s)
        rho = float(self.rho)
        return sum(float(w) * float(v) ** rho for w, v in zip(self.weights, s))

    def marginal(self, k, s_k):
        """ rho alpha_k s_k^(rho-1); infinite at zero for positive weights
        """
        alpha = float(self.weights[k])
        if alpha == 0.0:
            return 0.0
        if float(s_k) <= 0.0:
            return math.inf
        rho = float(self.rho)
        return rho * alpha * float(s_k) ** (rho - 1.0)

    def to_dict(self):
        return {'kind': self.kind, 'weights': vector_to_strings(self.weights),
                'rho': format_rational(self.rho)}

    def __repr__(self):
        return 'SeparableConcave({}, rho={})'.format(vector_to_strings(self.weights),
                                                     format_rational(self.rho))


def objective_from_dict(data):
    """ Parse {"kind": "fill"} | {"kind": "linear", "weights": [...]} |
        {"kind": "concave", "weights": [...], "rho": "p/q"}
    """
    try:
        kind = data['kind']
        if kind == 'fill':
            return Fill()
        if kind == 'linear':
            return Linear(data['weights'])
        if kind == 'concave':
            return SeparableConcave(data['weights'], data['rho'])
    except (KeyError, TypeError) as err:
        raise MalformedInput('malformed objective: {}'.format(err))
    raise MalformedInput('unknown objective kind: {!r}'.format(kind))


def evaluate_objective(obj, s):
    """ Objective value of a position-mass vector

        Args:
            ``obj`` (:class:`BaseObjective`): value function
            ``s`` (iterable or PositionMasses): masses

        Returns:
            Fraction for Fill/Linear, float for SeparableConcave
    """
    values = list(getattr(s, 's', s))
    return obj.evaluate(values)
