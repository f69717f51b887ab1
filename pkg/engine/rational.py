# -*- coding: utf-8 -*-
"""
.. module:: engine
   :platform: Unix
   :synopsis: Exact rational carriers: parsing, formatting and read-only numpy containers

"""

from fractions import Fraction
from numbers import Rational

import numpy as np

from engine.errors import DimensionMismatch, MalformedInput

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rational(value):
    """ Convert a JSON-ish scalar to a Fraction

        Accepts Fractions, integers, "p/q" / decimal strings and floats
        (floats are read through their shortest repr, so 0.1 becomes 1/10).

        Args:
            ``value`` (any): value to convert

        Returns:
            ``Fraction`` in lowest terms
    """
    if isinstance(value, bool):
        raise MalformedInput('booleans are not rationals: {!r}'.format(value))
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise MalformedInput('non-finite number: {!r}'.format(value))
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise MalformedInput('not a rational: {!r}'.format(value))
    raise MalformedInput('not a rational: {!r}'.format(value))


def format_rational(value):
    """ Serialize a Fraction as "p/q", or "p" when the denominator is one
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return '{}/{}'.format(value.numerator, value.denominator)


def rationalize(value, max_denominator=10 ** 12):
    """ Continued-fraction rounding of a float, for reporting only
    """
    return Fraction(float(value)).limit_denominator(max_denominator)


def frozen(array):
    array.flags.writeable = False
    return array


def rational_vector(values, length=None):
    """ Build a read-only numpy object vector of Fractions

        Args:
            ``values`` (iterable): entries
            ``length`` (int): expected length, checked if given

        Returns:
            numpy object array
    """
    entries = [to_rational(v) for v in values]
    if length is not None and len(entries) != length:
        raise DimensionMismatch('expected {} entries, got {}'.format(length, len(entries)))
    out = np.empty(len(entries), dtype=object)
    out[:] = entries
    return frozen(out)


def rational_matrix(rows, shape=None):
    """ Build a read-only numpy object matrix of Fractions from nested rows
    """
    rows = [list(r) for r in rows]
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    if any(len(r) != n_cols for r in rows) or (shape is not None and (n_rows, n_cols) != tuple(shape)):
        raise DimensionMismatch('matrix shape {} does not match {}'.format(
            (n_rows, n_cols), shape))
    out = np.empty((n_rows, n_cols), dtype=object)
    for r, row in enumerate(rows):
        for c, v in enumerate(row):
            out[r, c] = to_rational(v)
    return frozen(out)


def zeros(shape):
    out = np.empty(shape, dtype=object)
    out.fill(ZERO)
    return out


def vector_to_strings(values):
    return [format_rational(v) for v in values]


def matrix_to_strings(matrix):
    return [[format_rational(v) for v in row] for row in matrix]
