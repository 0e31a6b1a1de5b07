#!/usr/bin/env python3
"""Run every figure scenario with its defaults and collect the outputs.

Usage: python scripts/run_all_figures.py [output_root]

Writes one directory per scenario under output_root (default ./runs) and
prints each scenario's summary scalars.  Runtime is a few minutes, most of
it in the two fig5 position maps.
"""

import sys
import time

from cavitysim.config import parse_config
from cavitysim.runner import run_scenario

RUNS = [
    ("fig2_single_atom", 'scenario = "fig2_single_atom"\n'),
    ("fig3_two_atom", 'scenario = "fig3_two_atom"\n'),
    ("fig4_correlations", 'scenario = "fig4_correlations"\n'),
    ("fig5_D1", 'scenario = "fig5_position_map"\ndesign = "D1"\n'),
    ("fig5_D3", 'scenario = "fig5_position_map"\ndesign = "D3"\n'),
    ("wstate_n3", 'scenario = "n_atom_wstate"\nn_atoms = 3\n'),
]


def main() -> int:
    root = sys.argv[1] if len(sys.argv) > 1 else "runs"
    for name, text in RUNS:
        cfg = parse_config(text)
        t0 = time.perf_counter()
        report = run_scenario(cfg, output_dir=f"{root}/{name}")
        dt = time.perf_counter() - t0
        print(f"== {name} ({dt:.1f} s) -> {report.output_dir}")
        for key in sorted(report.summary):
            print(f"   {key} = {report.summary[key]:.6g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
