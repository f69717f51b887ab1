# -*- coding: utf-8 -*-
"""
.. module:: workbench
   :platform: Unix
   :synopsis: Reproduction suite for the worked examples shipped under fixtures/

"""

import os

from engine.base_objective import Fill, objective_from_dict
from engine.converse import auto_improve
from engine.crp import caps_from_lottery, continuum_crp
from engine.designer_lp import solve_designer
from engine.errors import MalformedInput
from engine.instance import Instance, convexity_report
from engine.mechanism import (DirectMechanism, bundle_costs, expand_common_lottery,
                              feasibility_report, ic_slack, mechanism_value)
from engine.optimizer import optimal_lottery_fill
from engine.rational import ONE, format_rational, to_rational
from workbench import config
from workbench.io import load_json, lottery_from_json

import logging
logging.basicConfig()
logger = logging.getLogger('Workbench-Reproduce')
logger.setLevel(logging.INFO)

FIGURES = ('fig1', 'fig2', 'fig3', 'fig4', 'appendixA1')


class Reproduction(object):
    """ Expected versus computed quantities of one worked example
    """

    def __init__(self, figure):
        self.figure = figure
        self.rows = []

    def compare(self, name, expected, computed):
        self.rows.append({'name': name, 'expected': _render(expected),
                          'computed': _render(computed), 'match': expected == computed})

    @property
    def ok(self):
        return all(row['match'] for row in self.rows)

    def to_dict(self):
        return {'figure': self.figure, 'ok': self.ok, 'rows': list(self.rows)}


def _render(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_render(v) for v in value]
    try:
        return format_rational(value)
    except (TypeError, ValueError):
        return value


def _fixture(name, fixtures_dir):
    return load_json(os.path.join(fixtures_dir, '{}.json'.format(name)))


def _rationals(values):
    return [to_rational(v) for v in values]


def reproduce_fig1(data):
    out = Reproduction('fig1')
    inst = Instance.from_dict(data['instance'])
    obj = objective_from_dict(data['objective'])
    expected = data['expected']

    first_best = DirectMechanism.from_dict(data['first_best'])
    out.compare('first_best', to_rational(expected['first_best']),
                mechanism_value(inst, first_best, obj))
    out.compare('first_best_feasible', expected['first_best_feasible'],
                feasibility_report(inst, first_best).is_feasible)

    uniform = expand_common_lottery(inst, lottery_from_json(data['uniform_lottery']))
    out.compare('uniform', to_rational(expected['uniform']), mechanism_value(inst, uniform, obj))

    optimal = optimal_lottery_fill(inst)
    out.compare('optimal_lottery', _rationals(data['optimal_lottery']['c']), list(optimal.c))
    optimal_mech = expand_common_lottery(inst, optimal)
    out.compare('optimal', to_rational(expected['optimal']), mechanism_value(inst, optimal_mech, obj))
    caps = caps_from_lottery(inst, optimal)
    out.compare('optimal_masses', _rationals(expected['optimal_masses']), list(caps.s))
    out.compare('crp_cutoffs', _rationals(expected['crp_cutoffs']), continuum_crp(inst, caps).cutoffs)
    out.compare('designer_lp', to_rational(expected['optimal']), solve_designer(inst, obj)[1])
    return out


def reproduce_fig2(data):
    out = Reproduction('fig2')
    inst = Instance.from_dict(data['instance'])
    obj = objective_from_dict(data['objective'])
    expected = data['expected']
    for name in ('binary_menu', 'ceei'):
        mech = DirectMechanism.from_dict(data[name])
        out.compare(name, to_rational(expected[name]), mechanism_value(inst, mech, obj))
        out.compare('{}_feasible'.format(name), True, feasibility_report(inst, mech).is_feasible)
    ceei = DirectMechanism.from_dict(data['ceei'])
    budget = to_rational(data['ceei_budget'])
    costs = bundle_costs(ceei, data['ceei_prices'])
    out.compare('ceei_within_budget', True, all(cost <= budget for cost in costs))
    return out


def reproduce_fig3(data):
    out = Reproduction('fig3')
    inst = Instance.from_dict(data['instance'])
    mech = DirectMechanism.from_dict(data['mechanism'])
    expected = data['expected']
    report = feasibility_report(inst, mech)
    out.compare('violated_ics', [tuple(p) for p in expected['violated_ics']], report.violated_ics)
    out.compare('ic_slack_2_0', to_rational(expected['ic_slack_2_0']), ic_slack(inst, mech, 2, 0))
    out.compare('local_ics_hold', True,
                not any(abs(i - j) == 1 for i, j in report.violated_ics))
    return out


def reproduce_fig4(data):
    out = Reproduction('fig4')
    inst = Instance.from_dict(data['instance'])
    obj = objective_from_dict(data['objective'])
    expected = data['expected']
    out.compare('second_differences', _rationals(expected['second_differences']),
                list(convexity_report(inst).second_differences))
    lottery = optimal_lottery_fill(inst)
    out.compare('common_lottery_vector', _rationals(data['common_lottery']['c']), list(lottery.c))
    out.compare('common_lottery', to_rational(expected['common_lottery']),
                mechanism_value(inst, expand_common_lottery(inst, lottery), obj))
    menu = DirectMechanism.from_dict(data['binary_menu'])
    out.compare('binary_menu', to_rational(expected['binary_menu']), mechanism_value(inst, menu, obj))
    out.compare('binary_menu_feasible', True, feasibility_report(inst, menu).is_feasible)
    _, lp_value = solve_designer(inst, obj)
    out.compare('designer_lp', to_rational(expected['designer_lp']), lp_value)

    search = auto_improve(inst, Fill(), d=to_rational(data['perturb_D']))
    out.compare('perturbation_found', True, search.found)
    if search.found:
        _, gain = search.improvement
        p = search.params
        promised = p['D'] * p['delta'] * inst.F[p['fill_index']]
        out.compare('perturbation_gain', promised, gain)
    return out


def _appendix_k(epsilon):
    if epsilon > 0:
        return to_rational('2/3')
    return 4 / (9 - 18 * epsilon)


def reproduce_appendixA1(data):
    out = Reproduction('appendixA1')
    obj = objective_from_dict(data['objective'])
    menu = DirectMechanism.from_dict(data['binary_menu'])
    for case in data['cases']:
        epsilon = to_rational(case['epsilon'])
        tag = 'eps={}'.format(format_rational(epsilon))
        inst = Instance(data['n'], case['f'], data['g'], data['D'])
        expected = case['expected']
        k = _appendix_k(epsilon)
        out.compare('{} k'.format(tag), to_rational(case['k']), k)
        common = mechanism_value(inst, expand_common_lottery(inst, optimal_lottery_fill(inst)), obj)
        out.compare('{} common_lottery'.format(tag), to_rational(expected['common_lottery']), common)
        out.compare('{} closed_form'.format(tag), 2 * ONE / 3 - epsilon * k, common)
        out.compare('{} binary_menu'.format(tag), to_rational(expected['binary_menu']),
                    mechanism_value(inst, menu, obj))
        out.compare('{} binary_menu_feasible'.format(tag), True,
                    feasibility_report(inst, menu).is_feasible)
        out.compare('{} designer_lp'.format(tag), to_rational(expected['designer_lp']),
                    solve_designer(inst, obj)[1])
        sign = (common > 2 * ONE / 3) - (common < 2 * ONE / 3)
        out.compare('{} comparison_sign'.format(tag), -((epsilon > 0) - (epsilon < 0)), sign)
    return out


def reproduce(name, fixtures_dir=None):
    """ Run one worked example against its fixture

        Args:
            ``name`` (str): one of fig1, fig2, fig3, fig4, appendixA1
            ``fixtures_dir`` (str): fixture directory, default from configuration

        Returns:
            :class:`Reproduction`
    """
    if name not in FIGURES:
        raise MalformedInput('unknown figure {!r}, choose from {}'.format(name, ', '.join(FIGURES)))
    data = _fixture(name, fixtures_dir or config.FIXTURES_DIR)
    try:
        result = globals()['reproduce_{}'.format(name)](data)
    except (KeyError, TypeError) as err:
        raise MalformedInput('malformed fixture {}: {}'.format(name, err))
    for row in result.rows:
        if not row['match']:
            logger.warning('{} {}: expected {} got {}'.format(
                name, row['name'], row['expected'], row['computed']))
    logger.info('{} reproduced: {}'.format(name, result.ok))
    return result
