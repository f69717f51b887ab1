# -*- coding: utf-8 -*-
"""
.. module:: engine
   :platform: Unix
   :synopsis: Exact rational linear programs and a two-phase tableau simplex

   Every number in the tableau is a ``Fraction`` held in a numpy object
   array. Pivoting follows Bland's rule (lowest eligible column enters,
   lowest basic column leaves among ratio ties), which cannot cycle.

   Dual prices are reported as shadow prices: ``duals[row]`` is the rate of
   change of the optimal value when that row's right-hand side grows.
   Variable upper bounds are turned into explicit rows named ``ub[<var>]``,
   and lower bounds are removed by shifting.
"""

from fractions import Fraction

import numpy as np

from engine.rational import ZERO, format_rational, zeros

import logging
logging.basicConfig()
logger = logging.getLogger('Simplex-Solver')
logger.setLevel(logging.INFO)

OPTIMAL = 'optimal'
INFEASIBLE = 'infeasible'
UNBOUNDED = 'unbounded'

LE, GE, EQ = '<=', '>=', '='


class LinearProgram(object):
    """ Standard-form LP with named variables and named rows
    """

    def __init__(self, sense='max', name='lp', kind=None):
        """ Constructor

            Args:
                ``sense`` (str): 'max' or 'min'
                ``name`` (str): label used in dumps and logs
                ``kind`` (str): optional tag set by builders ('designer', 'min_mass')
        """
        assert sense in ('max', 'min'), 'sense must be max or min'
        self.sense = sense
        self.name = name
        self.kind = kind
        self._var_names = []
        self._var_index = {}
        self._costs = []
        self._lower = []
        self._upper = []
        self._row_names = []
        self._row_index = {}
        self._rows = []
        self._relations = []
        self._rhs = []

    def add_variable(self, name, cost=0, lower=0, upper=None):
        """ Register a variable

            Args:
                ``name`` (str): unique name such as "a[3][1]"
                ``cost`` (rational): objective coefficient
                ``lower`` (rational): finite lower bound
                ``upper`` (rational or None): upper bound, None for +infinity

            Returns:
                column index (int)
        """
        assert name not in self._var_index, 'duplicate variable {}'.format(name)
        lower = Fraction(lower)
        upper = None if upper is None else Fraction(upper)
        assert upper is None or lower <= upper, 'bounds of {} are inverted'.format(name)
        self._var_index[name] = len(self._var_names)
        self._var_names.append(name)
        self._costs.append(Fraction(cost))
        self._lower.append(lower)
        self._upper.append(upper)
        return self._var_index[name]

    def add_constraint(self, name, coefficients, relation, rhs):
        """ Register a row sum_j coefficients[j] x_j (relation) rhs

            Args:
                ``name`` (str): unique row name such as "IC[2][0]"
                ``coefficients`` (dict): variable name -> coefficient
                ``relation`` (str): '<=', '>=' or '='
                ``rhs`` (rational): right-hand side
        """
        assert relation in (LE, GE, EQ), 'unknown relation {}'.format(relation)
        assert name not in self._row_index, 'duplicate row {}'.format(name)
        row = {}
        for var, coef in coefficients.items():
            coef = Fraction(coef)
            if coef != 0:
                row[self._var_index[var]] = row.get(self._var_index[var], ZERO) + coef
        self._row_index[name] = len(self._row_names)
        self._row_names.append(name)
        self._rows.append(row)
        self._relations.append(relation)
        self._rhs.append(Fraction(rhs))

    @property
    def variables(self):
        return list(self._var_names)

    @property
    def constraint_names(self):
        return list(self._row_names)

    @property
    def n_variables(self):
        return len(self._var_names)

    @property
    def n_constraints(self):
        return len(self._row_names)

    @property
    def costs(self):
        return list(self._costs)

    @property
    def lower(self):
        return list(self._lower)

    @property
    def upper(self):
        return list(self._upper)

    @property
    def relations(self):
        return list(self._relations)

    @property
    def rhs(self):
        return list(self._rhs)

    @property
    def matrix(self):
        """ Dense constraint matrix as a numpy object array
        """
        out = zeros((self.n_constraints, self.n_variables))
        for r, row in enumerate(self._rows):
            for j, coef in row.items():
                out[r, j] = coef
        return out

    def variable_index(self, name):
        return self._var_index[name]

    def row(self, name):
        """ Row as {variable name: coefficient}
        """
        return {self._var_names[j]: c for j, c in self._rows[self._row_index[name]].items()}

    def bounded_rows(self):
        """ All rows including one ``ub[<var>]`` row per finite upper bound

            Returns:
                list of (name, {column: coefficient}, relation, rhs)
        """
        rows = [(name, dict(row), rel, rhs) for name, row, rel, rhs
                in zip(self._row_names, self._rows, self._relations, self._rhs)]
        for j, upper in enumerate(self._upper):
            if upper is not None:
                rows.append(('ub[{}]'.format(self._var_names[j]), {j: Fraction(1)}, LE, upper))
        return rows

    def dump(self):
        """ Free-form MPS-like listing, for debugging
        """
        codes = {LE: 'L', GE: 'G', EQ: 'E'}
        lines = ['NAME {}'.format(self.name), 'OBJSENSE {}'.format(self.sense.upper()), 'ROWS',
                 ' N OBJ']
        lines += [' {} {}'.format(codes[rel], name) for name, rel in zip(self._row_names, self._relations)]
        lines.append('COLUMNS')
        for j, var in enumerate(self._var_names):
            entries = []
            if self._costs[j] != 0:
                entries.append('OBJ {}'.format(format_rational(self._costs[j])))
            entries += ['{} {}'.format(self._row_names[r], format_rational(row[j]))
                        for r, row in enumerate(self._rows) if j in row]
            lines.append(' {} {}'.format(var, ' '.join(entries)))
        lines.append('RHS')
        lines += [' RHS {} {}'.format(name, format_rational(rhs))
                  for name, rhs in zip(self._row_names, self._rhs) if rhs != 0]
        lines.append('BOUNDS')
        for var, lo, up in zip(self._var_names, self._lower, self._upper):
            if lo != 0:
                lines.append(' LO BND {} {}'.format(var, format_rational(lo)))
            if up is not None:
                lines.append(' UP BND {} {}'.format(var, format_rational(up)))
        lines.append('ENDATA')
        return '\n'.join(lines)


class LpSolution(object):
    """ Result of a simplex solve
    """

    def __init__(self, status, primal=None, value=None, duals=None, reduced_costs=None,
                 basis=None, pivots=0):
        self.status = status
        self.primal = primal or {}
        self.value = value
        self.duals = duals or {}
        self.reduced_costs = reduced_costs or {}
        self.basis = basis or []
        self.pivots = pivots

    @property
    def is_optimal(self):
        return self.status == OPTIMAL

    def to_dict(self):
        out = {'status': self.status, 'pivots': self.pivots}
        if self.is_optimal:
            out['value'] = format_rational(self.value)
            out['primal'] = {k: format_rational(v) for k, v in self.primal.items()}
            out['duals'] = {k: format_rational(v) for k, v in self.duals.items()}
            out['basis'] = list(self.basis)
        return out


class SimplexSolver(object):
    """ Two-phase tableau simplex over Fractions.

        A solver instance is stateful during :meth:`solve`; use one per LP.
    """

    def __init__(self, lp, max_pivots=None):
        """ Constructor

            Args:
                ``lp`` (:class:`LinearProgram`): problem
                ``max_pivots`` (int): optional safety cap on pivots
        """
        self.lp = lp
        self.max_pivots = max_pivots
        self.pivots = 0
        self._tableau = None
        self._basis = None

    def solve(self):
        lp = self.lp
        rows = lp.bounded_rows()
        lower = lp.lower
        n = lp.n_variables
        m = len(rows)

        # shift lower bounds out and make every rhs nonnegative
        row_sign = []
        relations = []
        for r, (name, coefs, rel, rhs) in enumerate(rows):
            shifted = rhs - sum((c * lower[j] for j, c in coefs.items()), ZERO)
            sign = 1
            if shifted < 0:
                sign = -1
                rel = {LE: GE, GE: LE, EQ: EQ}[rel]
            row_sign.append(sign)
            relations.append(rel)
            rows[r] = (name, {j: sign * c for j, c in coefs.items()}, rel, sign * shifted)

        n_slack = sum(1 for rel in relations if rel != EQ)
        n_art = sum(1 for rel in relations if rel != LE)
        n_cols = n + n_slack + n_art
        tableau = zeros((m, n_cols + 1))
        identity_col = [None] * m
        artificial = set()
        basis = [None] * m
        slack_at = n
        art_at = n + n_slack
        for r, (name, coefs, rel, rhs) in enumerate(rows):
            for j, c in coefs.items():
                tableau[r, j] = c
            tableau[r, -1] = rhs
            if rel == LE:
                tableau[r, slack_at] = Fraction(1)
                identity_col[r] = slack_at
                slack_at += 1
            else:
                if rel == GE:
                    tableau[r, slack_at] = Fraction(-1)
                    slack_at += 1
                tableau[r, art_at] = Fraction(1)
                identity_col[r] = art_at
                artificial.add(art_at)
                art_at += 1
            basis[r] = identity_col[r]
        self._tableau = tableau
        self._basis = basis
        self.pivots = 0

        regular = [j for j in range(n_cols) if j not in artificial]
        if artificial:
            phase_one = [ZERO] * n_cols
            for j in artificial:
                phase_one[j] = Fraction(-1)
            z = self._objective_row(phase_one)
            status = self._iterate(z, list(range(n_cols)))
            assert status == OPTIMAL, 'phase one cannot be unbounded'
            if z[-1] < 0:
                logger.info('{}: infeasible after {} pivots'.format(lp.name, self.pivots))
                return LpSolution(INFEASIBLE, pivots=self.pivots)
            self._drive_out_artificials(artificial, regular)

        sense_sign = 1 if lp.sense == 'max' else -1
        costs = [ZERO] * n_cols
        for j, c in enumerate(lp.costs):
            costs[j] = sense_sign * c
        z = self._objective_row(costs)
        status = self._iterate(z, regular)
        if status == UNBOUNDED:
            logger.info('{}: unbounded after {} pivots'.format(lp.name, self.pivots))
            return LpSolution(UNBOUNDED, pivots=self.pivots)

        shifted = [ZERO] * n_cols
        for r, j in enumerate(self._basis):
            shifted[j] = self._tableau[r, -1]
        primal = {name: shifted[j] + lower[j] for j, name in enumerate(lp.variables)}
        value = sum((c * primal[name] for c, name in zip(lp.costs, lp.variables)), ZERO)

        duals = {}
        for r, (name, coefs, rel, rhs) in enumerate(rows):
            duals[name] = sense_sign * row_sign[r] * z[identity_col[r]]
        reduced = {}
        original_rows = lp.bounded_rows()
        for j, name in enumerate(lp.variables):
            reduced[name] = lp.costs[j] - sum((duals[rname] * coefs.get(j, ZERO)
                                               for rname, coefs, _, _ in original_rows), ZERO)
        basis_names = [self._column_name(j, n) for j in self._basis]
        logger.debug('{}: optimal value {} after {} pivots'.format(
            lp.name, format_rational(value), self.pivots))
        return LpSolution(OPTIMAL, primal=primal, value=value, duals=duals, reduced_costs=reduced,
                          basis=basis_names, pivots=self.pivots)

    def _column_name(self, j, n):
        if j < n:
            return self.lp.variables[j]
        return '_aux{}'.format(j - n)

    def _objective_row(self, costs):
        """ Reduced-cost row z_j - c_j for the current basis (last entry: objective value)
        """
        tableau = self._tableau
        z = np.empty(tableau.shape[1], dtype=object)
        z[:-1] = [-c for c in costs]
        z[-1] = ZERO
        for r, j in enumerate(self._basis):
            if costs[j] != 0:
                z = z + costs[j] * tableau[r, :]
        return z

    def _iterate(self, z, allowed):
        tableau = self._tableau
        while True:
            entering = next((j for j in allowed if z[j] < 0), None)
            if entering is None:
                return OPTIMAL
            leaving = None
            best = None
            for r in range(tableau.shape[0]):
                coef = tableau[r, entering]
                if coef > 0:
                    ratio = tableau[r, -1] / coef
                    if best is None or ratio < best or (ratio == best and self._basis[r] < self._basis[leaving]):
                        best = ratio
                        leaving = r
            if leaving is None:
                return UNBOUNDED
            self._pivot(leaving, entering, z)
            if self.max_pivots is not None and self.pivots > self.max_pivots:
                raise RuntimeError('pivot limit {} exceeded'.format(self.max_pivots))

    def _pivot(self, r, j, z):
        tableau = self._tableau
        tableau[r, :] = tableau[r, :] / tableau[r, j]
        for i in range(tableau.shape[0]):
            if i != r and tableau[i, j] != 0:
                tableau[i, :] = tableau[i, :] - tableau[i, j] * tableau[r, :]
        if z[j] != 0:
            z[:] = z - z[j] * tableau[r, :]
        self._basis[r] = j
        self.pivots += 1
        logger.debug('pivot {}: row {} column {}'.format(self.pivots, r, j))

    def _drive_out_artificials(self, artificial, regular):
        tableau = self._tableau
        scratch = np.empty(tableau.shape[1], dtype=object)
        scratch.fill(ZERO)
        for r, j in enumerate(self._basis):
            if j in artificial:
                col = next((c for c in regular if tableau[r, c] != 0), None)
                # redundant row otherwise: the artificial stays basic at zero
                if col is not None:
                    self._pivot(r, col, scratch)


def simplex_solve(lp, max_pivots=None):
    """ Solve ``lp`` exactly

        Args:
            ``lp`` (:class:`LinearProgram`): problem

        Returns:
            :class:`LpSolution`; the status encodes infeasible / unbounded outcomes
    """
    solution = SimplexSolver(lp, max_pivots=max_pivots).solve()
    logger.info('{}: {} ({} pivots)'.format(lp.name, solution.status, solution.pivots))
    return solution


def _row_activity(coefs, primal, variables):
    return sum((c * primal[variables[j]] for j, c in coefs.items()), ZERO)


def dual_value(lp, solution):
    """ Dual objective sum_i pi_i b_i + sum_j r_j l_j; equals the primal value at optimality
    """
    value = sum((solution.duals[name] * rhs for name, _, _, rhs in lp.bounded_rows()), ZERO)
    value += sum((solution.reduced_costs[v] * lo for v, lo in zip(lp.variables, lp.lower)), ZERO)
    return value


def lagrange_multipliers(lp, solution):
    """ Nonnegative multipliers: +shadow for (max, <=) and (min, >=) rows, -shadow otherwise

        Equality rows keep the raw shadow price.
    """
    out = {}
    for name, _, rel, _ in lp.bounded_rows():
        price = solution.duals[name]
        if rel == EQ:
            out[name] = price
        elif (lp.sense == 'max') == (rel == LE):
            out[name] = price
        else:
            out[name] = -price
    return out


def complementary_slackness_violations(lp, solution):
    """ Exact optimality conditions that fail for ``solution``

        Checks primal feasibility, dual sign conditions, row and column
        complementary slackness.

        Returns:
            list of str (empty when every condition holds)
    """
    problems = []
    variables = lp.variables
    multipliers = lagrange_multipliers(lp, solution)
    for name, coefs, rel, rhs in lp.bounded_rows():
        residual = _row_activity(coefs, solution.primal, variables) - rhs
        if (rel == LE and residual > 0) or (rel == GE and residual < 0) or (rel == EQ and residual != 0):
            problems.append('row {} infeasible by {}'.format(name, format_rational(residual)))
        if rel != EQ and multipliers[name] < 0:
            problems.append('row {} has a wrong-signed dual'.format(name))
        if residual != 0 and solution.duals[name] != 0:
            problems.append('row {} is slack with a nonzero dual'.format(name))
    for name, lo in zip(variables, lp.lower):
        r = solution.reduced_costs[name]
        x = solution.primal[name]
        if x < lo:
            problems.append('variable {} below its lower bound'.format(name))
        if (lp.sense == 'max' and r > 0) or (lp.sense == 'min' and r < 0):
            problems.append('variable {} has an improving reduced cost'.format(name))
        if r != 0 and x != lo:
            problems.append('variable {} is off its bound with a nonzero reduced cost'.format(name))
    return problems
