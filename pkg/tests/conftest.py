# -*- coding: utf-8 -*-
import json
import os

import pytest

from engine.instance import Instance
from engine.mechanism import DirectMechanism

FIXTURES_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'fixtures')


def load_fixture(name):
    with open(os.path.join(FIXTURES_DIR, '{}.json'.format(name))) as handle:
        return json.load(handle)


@pytest.fixture
def fig1():
    return load_fixture('fig1')


@pytest.fixture
def fig2():
    return load_fixture('fig2')


@pytest.fixture
def fig3():
    return load_fixture('fig3')


@pytest.fixture
def fig4():
    return load_fixture('fig4')


@pytest.fixture
def uniform4():
    return Instance(4, ['1/4'] * 4, ['1/4'] * 4, 1)


@pytest.fixture
def fig4_instance(fig4):
    return Instance.from_dict(fig4['instance'])


@pytest.fixture
def fig2_menu(fig2):
    return DirectMechanism.from_dict(fig2['binary_menu'])


@pytest.fixture
def fig3_pair(fig3):
    return Instance.from_dict(fig3['instance']), DirectMechanism.from_dict(fig3['mechanism'])
