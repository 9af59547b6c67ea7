"""Gyrophase mixing as eps -> 0.

Runs the four-dimensional harness for each eps and compares its gyrophase
average with the limit u-solver. Takes about a minute with the defaults;
pass smaller sizes on the command line for a quick look:

    python demos/gyro_limit.py 24 4    # n_v, K_x
"""

import math
import sys
from dataclasses import replace

from gyrofp.config import HarnessSettings
from gyrofp.harness import epsilon_sweep
from gyrofp.solver import PhysicalParams

settings = HarnessSettings()
if len(sys.argv) > 2:
    settings = replace(settings, n_v=int(sys.argv[1]), K_x=int(sys.argv[2]))

t_end = 4 * math.pi * max(settings.epsilons)
report = epsilon_sweep(PhysicalParams(), t_end, settings)
print(report.table())
print("error decreasing:", report.error_decreasing, " l=1 harmonic decreasing:", report.harmonic_decreasing)
