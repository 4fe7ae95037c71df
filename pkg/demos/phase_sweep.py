"""
A small phase map
=================

Sweep the confidence bound and the opinion weight over a few seeds and
count regimes per cell.  The same grid can be run from a config file with
``opinion-action sweep``.
"""

from collections import Counter

from opinion_action.cli import sweep_rows
from opinion_action.config import parse_sweep_config

sweep = parse_sweep_config(
    """
    epsilon_grid = 0.05, 0.1, 0.2, 0.3
    phi_grid = 0.25, 0.5, 0.75
    seeds = 0, 1, 2, 3, 4
    horizon = 100
    """
)

counts = {}
for eps, phi, _, regime, *_ in sweep_rows(sweep, jobs=2):
    counts.setdefault((eps, phi), Counter())[regime] += 1

for (eps, phi), c in counts.items():
    print(f"epsilon={eps:<5} phi={phi:<5} {dict(c)}")
