"""Two-trajectory stability: distance between runs from nearby data.

Usage: python demos/stability.py [t_end]
"""

import sys
from dataclasses import replace
from pathlib import Path

from gyrofp import load_config, stability_experiment

config = load_config(Path(__file__).with_name("desk.ini"))
config = replace(config, t_end=float(sys.argv[1]) if len(sys.argv) > 1 else 1.0)
report = stability_experiment(config)
print(report.summary())
for tr in report.traces:
    print(f"delta={tr.delta:g}: s(t)/delta at end = {tr.distance[-1] / tr.delta:.4f}")
