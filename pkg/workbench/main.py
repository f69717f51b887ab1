# coding=utf-8

import sys

from workbench.cli import dispatch

import logging

logger = logging.getLogger(__name__)


if __name__ == '__main__':
    sys.exit(dispatch(sys.argv[1:]))
