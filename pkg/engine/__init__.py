# -*- coding: utf-8 -*-
from engine.errors import *
from engine.instance import Instance, new_instance, convexity_report
from engine.mechanism import DirectMechanism, CommonLottery, PositionMasses, feasibility_report
from engine.base_objective import Fill, Linear, SeparableConcave, objective_from_dict
