# -*- coding: utf-8 -*-
"""
.. module:: workbench
   :platform: Unix
   :synopsis: Command line front end over the engine

   Every subcommand prints one JSON document (or a CSV table with
   ``--format csv``) on stdout; diagnostics go through the loggers on
   stderr. Exit codes: 0 success, 1 computational "no", 2 malformed input.
"""

import sys
from argparse import ArgumentParser
from fractions import Fraction

from engine.base_objective import Fill, SeparableConcave
from engine.converse import auto_improve
from engine.crp import continuum_crp, simulate_finite
from engine.designer_lp import (build_designer_lp, dual_certificate, mechanism_from_solution,
                                solve_min_mass)
from engine.errors import IndexOutOfRange, MalformedInput, NotOptimal, WorkbenchError
from engine.instance import convexity_report
from engine.lpsolve import simplex_solve
from engine.mechanism import feasibility_report
from engine.optimizer import (kkt_check, lottery_from_masses, optimal_masses,
                              optimal_masses_flexible)
from engine.ordinal import (failing_gammas, normalize_gamma, optimal_common_lottery_ordinal,
                            ordinal_position_masses, uneven_convexity)
from engine.rational import format_rational, to_rational
from engine.transform import to_common_lottery, verify_decomposition
from workbench import config
from workbench.io import (load_instance, load_masses, load_mechanism, load_objective,
                          load_ordinal_instance, matrix_rows, write_csv, write_json)
from workbench.reproduce import FIGURES, reproduce

import logging
logging.basicConfig()
logger = logging.getLogger('Workbench-CLI')
logger.setLevel(logging.INFO)

LOGGERS = ('Instance', 'Mechanism-Checker', 'Simplex-Solver', 'Designer-LP', 'Lottery-Transform',
           'Lottery-Optimizer', 'Converse-Search', 'Capped-Random-Priority', 'Ordinal-Extension',
           'Agent-Stream', 'Workbench-CLI', 'Workbench-Reproduce')


class Outcome(object):
    """ What a subcommand hands back to :func:`dispatch`

        ``table`` is (header, rows) for ``--format csv``; ``text`` replaces
        the JSON payload entirely when set.
    """

    def __init__(self, payload, code=0, table=None, text=None):
        self.payload = payload
        self.code = code
        self.table = table
        self.text = text


def _cell(value):
    if isinstance(value, Fraction):
        return format_rational(value)
    return value


def _matrix_table(mech):
    return ('k', 'i', 'a'), [(k, i, _cell(v)) for k, i, v in matrix_rows(mech.a)]


def cmd_validate(args):
    inst = load_instance(args.instance)
    report = convexity_report(inst)
    payload = inst.to_dict()
    payload['F'] = [format_rational(v) for v in inst.F]
    payload['convexity'] = report.to_dict()
    table = (('k', 'f', 'F', 'g'),
             [(k, _cell(inst.f[k]), _cell(inst.F[k]), _cell(inst.g[k])) for k in range(inst.n)])
    return Outcome(payload, table=table)


def cmd_check(args):
    inst = load_instance(args.instance)
    mech = load_mechanism(args.mechanism)
    report = feasibility_report(inst, mech)
    if not report.is_feasible:
        logger.info('Mechanism infeasible, violated ICs: {}'.format(report.violated_ics))
    rows = [(i, j, _cell(report.ic_slack[i, j])) for i in range(inst.n) for j in range(inst.n)
            if i != j]
    return Outcome(report.to_dict(), code=0 if report.is_feasible else 1,
                   table=(('i', 'j', 'ic_slack'), rows))


def cmd_convexity(args):
    report = convexity_report(load_instance(args.instance))
    code = 1 if args.require_convex and not report.is_convex else 0
    rows = [(i + 1, _cell(v)) for i, v in enumerate(report.second_differences)]
    return Outcome(report.to_dict(), code=code, table=(('k', 'second_difference'), rows))


def cmd_optimal_lottery(args):
    inst = load_instance(args.instance)
    obj = load_objective(args.objective, n=inst.n)
    if args.flexible:
        masses = optimal_masses_flexible(inst, obj, xtol=config.BISECTION_XTOL)
    else:
        masses = optimal_masses(inst, obj, xtol=config.BISECTION_XTOL)
    lottery = lottery_from_masses(inst, masses, max_denominator=config.REPORT_MAX_DENOMINATOR)
    payload = {'lottery': lottery.to_dict(), 'masses': masses.to_dict(),
               'is_convex': convexity_report(inst).is_convex}
    if isinstance(obj, SeparableConcave):
        payload['kkt'] = kkt_check(inst, obj, masses, tol=config.KKT_TOL,
                                   flexible=args.flexible).to_dict()
    else:
        payload['value'] = format_rational(obj.evaluate(list(masses.s)))
    rows = [(k, _cell(masses.s[k]), _cell(lottery.c[k])) for k in range(inst.n)]
    return Outcome(payload, table=(('k', 's', 'c'), rows))


def cmd_solve_lp(args):
    inst = load_instance(args.instance)
    obj = load_objective(args.objective, n=inst.n)
    if not obj.is_linear:
        raise MalformedInput('solve-lp needs a fill or linear objective, got {!r}'.format(obj.kind))
    lp = build_designer_lp(inst, obj)
    if args.dump:
        return Outcome(None, text=lp.dump())
    solution = simplex_solve(lp)
    if not solution.is_optimal:
        raise NotOptimal('designer LP ended {}'.format(solution.status))
    mech = mechanism_from_solution(inst.n, solution)
    payload = mech.to_dict()
    payload['value'] = format_rational(solution.value)
    payload['certificate'] = dual_certificate(inst, lp, solution).to_dict()
    return Outcome(payload, table=_matrix_table(mech))


def cmd_transform(args):
    inst = load_instance(args.instance)
    mech = load_mechanism(args.mechanism)
    lottery = to_common_lottery(inst, mech)
    report = verify_decomposition(inst, mech)
    payload = {'lottery': lottery.to_dict(), 'decomposition': report.to_dict()}
    rows = [(k, _cell(v)) for k, v in enumerate(lottery.c)]
    return Outcome(payload, table=(('k', 'c'), rows))


def cmd_min_mass(args):
    inst = load_instance(args.instance)
    result = solve_min_mass(inst, load_masses(args.targets))
    payload = result.to_dict()
    payload['certificate'] = dual_certificate(inst, result.lp, result.solution).to_dict()
    table = _matrix_table(result.mechanism) if result.mechanism is not None else (('k', 'i', 'a'), [])
    return Outcome(payload, table=table)


def cmd_perturb(args):
    inst = load_instance(args.instance)
    mass = to_rational(args.mass) if args.mass is not None else None
    search = auto_improve(inst, Fill(), d=mass, points=config.D_GRID_POINTS)
    if not search.found:
        logger.info('No improving perturbation: {}'.format(search.diagnostic))
        return Outcome(search.to_dict(), code=1, table=(('k', 'i', 'a'), []))
    return Outcome(search.to_dict(), table=_matrix_table(search.improvement[0]))


def cmd_crp(args):
    inst = load_instance(args.instance)
    result = continuum_crp(inst, load_masses(args.caps))
    rows = [(m, _cell(t), k) for m, t, k in result.thresholds]
    return Outcome(result.to_dict(), table=(('step', 'cutoff', 'position'), rows))


def cmd_simulate_crp(args):
    inst = load_instance(args.instance)
    workers = args.workers if args.workers is not None else config.CRP_WORKERS
    result = simulate_finite(inst, load_masses(args.caps), args.agents, args.reps, args.seed,
                             workers=workers)
    return Outcome(result.to_dict(),
                   table=(('k', 'i', 'empirical', 'stderr', 'analytic'), result.rows()))


def cmd_ordinal(args):
    oi = load_ordinal_instance(args.instance)
    obj = load_objective(args.objective, n=oi.n)
    views = {name: uneven_convexity(normalize_gamma(oi, name)).to_dict() for name in oi.gammas}
    failing = failing_gammas(oi)
    payload = {'gammas': views, 'failing': failing}
    if failing:
        logger.info('Convexity fails for {}'.format(failing))
        return Outcome(payload, code=1, table=(('k', 'c', 's'), []))
    lottery = optimal_common_lottery_ordinal(oi, obj)
    masses = ordinal_position_masses(oi, lottery)
    payload['lottery'] = lottery.to_dict()
    payload['masses'] = masses.to_dict()
    rows = [(k, _cell(lottery.c[k]), _cell(masses.s[k])) for k in range(oi.n)]
    return Outcome(payload, table=(('k', 'c', 's'), rows))


def cmd_reproduce(args):
    result = reproduce(args.figure, fixtures_dir=args.fixtures_dir)
    rows = [(row['name'], row['expected'], row['computed'], row['match']) for row in result.rows]
    return Outcome(result.to_dict(), code=0 if result.ok else 1,
                   table=(('name', 'expected', 'computed', 'match'), rows))


def build_parser():
    parser = ArgumentParser(prog="workbench")
    parser.add_argument('--format', choices=('json', 'csv'), default='json', dest='format')
    parser.add_argument('--log-level', default=config.LOG_LEVEL, dest='log_level', type=str)
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    p = sub.add_parser('validate')
    p.add_argument('instance', type=str)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser('check')
    p.add_argument('mechanism', type=str)
    p.add_argument('--instance', required=True, dest='instance', type=str)
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser('convexity')
    p.add_argument('instance', type=str)
    p.add_argument('--require-convex', action='store_true', dest='require_convex')
    p.set_defaults(handler=cmd_convexity)

    p = sub.add_parser('optimal-lottery')
    p.add_argument('instance', type=str)
    p.add_argument('--objective', required=True, dest='objective', type=str)
    p.add_argument('--flexible', action='store_true', dest='flexible')
    p.set_defaults(handler=cmd_optimal_lottery)

    p = sub.add_parser('solve-lp')
    p.add_argument('instance', type=str)
    p.add_argument('--objective', required=True, dest='objective', type=str)
    p.add_argument('--dump', action='store_true', dest='dump')
    p.set_defaults(handler=cmd_solve_lp)

    p = sub.add_parser('transform')
    p.add_argument('mechanism', type=str)
    p.add_argument('--instance', required=True, dest='instance', type=str)
    p.set_defaults(handler=cmd_transform)

    p = sub.add_parser('min-mass')
    p.add_argument('instance', type=str)
    p.add_argument('--targets', required=True, dest='targets', type=str)
    p.set_defaults(handler=cmd_min_mass)

    p = sub.add_parser('perturb')
    p.add_argument('instance', type=str)
    p.add_argument('--D', default=None, dest='mass', type=str)
    p.set_defaults(handler=cmd_perturb)

    p = sub.add_parser('crp')
    p.add_argument('instance', type=str)
    p.add_argument('--caps', required=True, dest='caps', type=str)
    p.set_defaults(handler=cmd_crp)

    p = sub.add_parser('simulate-crp')
    p.add_argument('instance', type=str)
    p.add_argument('--caps', required=True, dest='caps', type=str)
    p.add_argument('--agents', required=True, dest='agents', type=int)
    p.add_argument('--reps', required=True, dest='reps', type=int)
    p.add_argument('--seed', required=True, dest='seed', type=int)
    p.add_argument('--workers', default=None, dest='workers', type=int)
    p.set_defaults(handler=cmd_simulate_crp)

    p = sub.add_parser('ordinal')
    p.add_argument('instance', type=str)
    p.add_argument('--objective', required=True, dest='objective', type=str)
    p.set_defaults(handler=cmd_ordinal)

    p = sub.add_parser('reproduce')
    p.add_argument('figure', choices=FIGURES)
    p.add_argument('--fixtures-dir', default=None, dest='fixtures_dir', type=str)
    p.set_defaults(handler=cmd_reproduce)
    return parser


def set_log_level(level):
    level = level.upper()
    if level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
        raise MalformedInput('unknown log level {!r}'.format(level))
    for name in LOGGERS:
        logging.getLogger(name).setLevel(level)


def emit(outcome, fmt, stream):
    if outcome.text is not None:
        stream.write(outcome.text)
        if not outcome.text.endswith('\n'):
            stream.write('\n')
    elif fmt == 'csv' and outcome.table is not None:
        header, rows = outcome.table
        write_csv(header, rows, stream)
    else:
        write_json(outcome.payload, stream)


def dispatch(argv=None, stream=None):
    """ Parse ``argv``, run one subcommand and write its output

        Args:
            ``argv`` (list(str)): arguments without the program name
            ``stream`` (file): output stream, stdout by default

        Returns:
            int exit code
    """
    stream = stream or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as err:
        return err.code if isinstance(err.code, int) else 2
    try:
        set_log_level(args.log_level)
        outcome = args.handler(args)
    except (MalformedInput, IndexOutOfRange) as err:
        logger.error('Malformed input: {}'.format(err))
        return 2
    except WorkbenchError as err:
        logger.error('{}: {}'.format(type(err).__name__, err))
        return 1
    emit(outcome, args.format, stream)
    return outcome.code
