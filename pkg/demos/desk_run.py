"""Self-consistent desk run with the a-priori monitors, then a restart check.

Usage: python demos/desk_run.py [t_end]
"""

import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from gyrofp import check_apriori, load_config, read_series, run, write_series

config = load_config(Path(__file__).with_name("desk.ini"))
if len(sys.argv) > 1:
    config = replace(config, t_end=float(sys.argv[1]))

result = run(config)
print(f"status {result.status} after {result.state.step_count} steps, t = {result.state.time:g}")
print(f"{'t':>6s} {'mass':>18s} {'||f||_2,u':>12s} {'||f||_2,m':>12s} {'min f':>11s}")
for r in result.series:
    print(f"{r.t:6.2f} {r.mass:18.15f} {r.norm_2u:12.6e} {r.norm_2m:12.6e} {r.min_f:11.3e}")
print()
print(result.report.summary())

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "series.csv"
    write_series(result.series, path)
    again = check_apriori(read_series(path), config.params, config.slack)
    print("verdicts reproduced from CSV:", again.verdicts() == result.report.verdicts())
