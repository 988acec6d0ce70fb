"""Transient cold-bath flux with and without the structured environment.

Two regimes: (g12, g23, ga, gb) = (30, 15, 20, 40) and (50, 25, 40, 30),
each against its ga = 0 twin. Writes one CSV per regime with both curves.
"""
from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from collisionflux import ModelConfig, SteadyStateCriterion, run
from _common import write_csv

REGIMES = {
    "a": dict(g12=30.0, g23=15.0, ga=20.0, gb=40.0),
    "b": dict(g12=50.0, g23=25.0, ga=40.0, gb=30.0),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/fig2")
    ap.add_argument("--Th", type=float, default=10.0)
    ap.add_argument("--Tc", type=float, default=1.0)
    args = ap.parse_args()
    crit = SteadyStateCriterion()
    for tag, couplings in REGIMES.items():
        hse = ModelConfig(Th=args.Th, Tc=args.Tc, **couplings)
        bare = hse.replace(ga=0.0)
        t_hse, t_bare = run(hse, crit), run(bare, crit)
        n = min(t_hse.rounds, t_bare.rounds)
        # the shorter run is padded with its steady value
        j_hse = np.pad(t_hse.J, (0, max(0, t_bare.rounds - t_hse.rounds)), mode="edge")
        j_bare = np.pad(t_bare.J, (0, max(0, t_hse.rounds - t_bare.rounds)), mode="edge")
        rows = zip(np.arange(1, len(j_hse) + 1), j_hse, j_bare)
        write_csv(Path(args.out) / f"fig2{tag}.csv", ["n", "J_hse", "J_bare"], rows)
        print(f"fig2{tag}: J_ss hse={t_hse.J_ss:.6g} bare={t_bare.J_ss:.6g} (common rounds {n})")


if __name__ == "__main__":
    main()
