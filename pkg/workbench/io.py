# -*- coding: utf-8 -*-
"""
.. module:: workbench
   :platform: Unix
   :synopsis: JSON and CSV input/output for the command line

"""

import csv
import json
import sys

from engine.base_objective import objective_from_dict
from engine.errors import MalformedInput
from engine.instance import Instance
from engine.mechanism import CommonLottery, DirectMechanism, PositionMasses
from engine.ordinal import OrdinalInstance


def load_json(path):
    """ Read a JSON document

        Raises:
            :class:`MalformedInput` when the file is missing or not JSON
    """
    try:
        with open(path, 'r') as handle:
            return json.load(handle)
    except (OSError, ValueError) as err:
        raise MalformedInput('cannot read {}: {}'.format(path, err))


def _expect_object(data, path):
    if not isinstance(data, dict):
        raise MalformedInput('{} must hold a JSON object'.format(path))
    return data


def load_instance(path):
    return Instance.from_dict(_expect_object(load_json(path), path))


def load_ordinal_instance(path):
    return OrdinalInstance.from_dict(_expect_object(load_json(path), path))


def load_mechanism(path):
    return DirectMechanism.from_dict(_expect_object(load_json(path), path))


def load_objective(path, n=None):
    """ Objective from a JSON file; with ``n`` its weights must cover ``n`` positions
    """
    obj = objective_from_dict(_expect_object(load_json(path), path))
    if n is not None:
        obj.check_positions(n)
    return obj


def masses_from_json(data):
    """ {"s": [...]} or a bare list
    """
    values = data.get('s') if isinstance(data, dict) else data
    if not isinstance(values, list):
        raise MalformedInput('masses must be a list or {"s": [...]}')
    return PositionMasses(values)


def load_masses(path):
    return masses_from_json(load_json(path))


def lottery_from_json(data):
    try:
        return CommonLottery(data['c'])
    except (KeyError, TypeError) as err:
        raise MalformedInput('malformed lottery: {}'.format(err))


def write_json(payload, stream=None):
    stream = stream or sys.stdout
    json.dump(payload, stream, indent=2, sort_keys=True)
    stream.write('\n')


def write_csv(header, rows, stream=None):
    writer = csv.writer(stream or sys.stdout, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)


def matrix_rows(matrix):
    """ (k, i, value) for every cell of an N x N matrix
    """
    return [(k, i, matrix[k][i]) for k in range(len(matrix)) for i in range(len(matrix[k]))]
