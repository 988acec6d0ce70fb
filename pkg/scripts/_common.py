"""Small helpers shared by the experiment scripts."""
from __future__ import annotations

import csv
from pathlib import Path


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format(float(v), ".17g") if not isinstance(v, str) else v for v in row])
    print(f"wrote {path}")
