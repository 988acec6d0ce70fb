"""Energy levels of the chain with and without the dephasing coupling to A."""
from __future__ import annotations

import argparse
from pathlib import Path

from collisionflux import ModelConfig
from collisionflux.spectrum import min_band_gap, system_spectrum
from _common import write_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/fig3")
    ap.add_argument("--ga", type=float, default=40.0)
    args = ap.parse_args()
    cfg = ModelConfig(g12=50.0, g23=20.0, ga=args.ga)
    bare = system_spectrum(cfg, include_hse=False)
    coupled = system_spectrum(cfg, include_hse=True)
    rows = [("bare", i, e) for i, e in enumerate(bare.eigenvalues)]
    rows += [("coupled", i, e) for i, e in enumerate(coupled.eigenvalues)]
    write_csv(Path(args.out) / "levels.csv", ["variant", "index", "eigenvalue"], rows)
    print(f"band gap bare={min_band_gap(bare):.6g} coupled={min_band_gap(coupled):.6g}")


if __name__ == "__main__":
    main()
