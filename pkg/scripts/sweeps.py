"""Steady-state flux maps over (ga, gb), (ga, p) and (gb, p).

Each map is a 9x9 grid by default; pass --count for finer contours.
"""
from __future__ import annotations

import argparse
import os
from pathlib import Path

from collisionflux import ModelConfig, SteadyStateCriterion
from collisionflux.sweep import Axis, SweepSpec, run_sweep
from _common import write_csv


def specs(count: int) -> dict[str, SweepSpec]:
    crit = SteadyStateCriterion()
    chain = ModelConfig(g12=50.0, g23=25.0)
    g = lambda name: Axis(name, 0.0, 40.0, count)
    p = Axis("p", 0.0, 1.0, count)
    return {
        "fig4": SweepSpec(chain, g("ga"), g("gb"), crit),
        "fig5a": SweepSpec(chain.replace(gb=10.0), g("ga"), p, crit),
        "fig5b": SweepSpec(chain.replace(gb=30.0), g("ga"), p, crit),
        "fig6a": SweepSpec(chain.replace(ga=20.0), g("gb"), p, crit),
        "fig6b": SweepSpec(chain.replace(ga=40.0), g("gb"), p, crit),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/sweeps")
    ap.add_argument("--count", type=int, default=9)
    ap.add_argument("--workers", type=int, default=os.cpu_count())
    ap.add_argument("--only", nargs="*", help="subset of fig4 fig5a fig5b fig6a fig6b")
    args = ap.parse_args()
    for name, spec in specs(args.count).items():
        if args.only and name not in args.only:
            continue
        grid = run_sweep(spec, workers=args.workers)
        write_csv(Path(args.out) / f"{name}.csv",
                  ["axis1", "axis2", "J_ss", "converged", "rounds"], grid.rows())


if __name__ == "__main__":
    main()
