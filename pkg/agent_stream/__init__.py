# -*- coding: utf-8 -*-

from agent_stream.base_stream import BaseAgentStream
from agent_stream.numpy_stream import SeededAgentStream
