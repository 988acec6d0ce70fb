"""Command-line entry point: ``collisionflux run|sweep|spectrum CONFIG --out DIR``.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical
integrity error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .config import TOOL, dump_run, dump_sweep, load_json, parse_run, parse_sweep
from .engine import run
from .errors import ConfigError, NumericalIntegrityError
from .spectrum import spectrum_report
from .sweep import run_sweep

log = logging.getLogger(TOOL)

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4


def fmt(x) -> str:
    return format(float(x), ".17g")


class OutputError(Exception):
    pass


def _outdir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out}: {exc.strerror}") from None
    return out


def _write_csv(path: Path, header, rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None


def _write_manifest(out: Path, command: str, config: dict, started: float, summary: dict, **extra):
    manifest = {
        "tool": TOOL,
        "version": __version__,
        "command": command,
        "config": config,
        **extra,
        "duration_s": time.perf_counter() - started,
        "summary": summary,
    }
    try:
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write manifest: {exc.strerror}") from None


def cmd_run(args) -> int:
    started = time.perf_counter()
    data = load_json(args.config)
    stride = args.stride or data.pop("_stride", 1)
    data.pop("_stride", None)
    cfg, crit = parse_run(data)
    out = _outdir(args.out)
    traj = run(cfg, crit)
    rows = (
        (int(traj.n[k]), fmt(traj.dQ_cold[k]), fmt(traj.dQ_hot[k]), fmt(traj.J[k]), fmt(traj.E_register[k]))
        for k in range(0, traj.rounds, stride)
    )
    _write_csv(out / "trajectory.csv", ["n", "dQ_cold", "dQ_hot", "J_n", "E_register"], rows)
    summary = {"steady": traj.steady, "rounds": traj.rounds, "J_ss": traj.J_ss}
    _write_manifest(out, "run", dump_run(cfg, crit), started, summary, stride=stride)
    log.info("run: steady=%s after %d rounds, J_ss=%.12g", traj.steady, traj.rounds, traj.J_ss)
    return EXIT_OK


def cmd_sweep(args) -> int:
    started = time.perf_counter()
    data = load_json(args.config)
    data.pop("_stride", None)
    spec = parse_sweep(data)
    out = _outdir(args.out)

    def progress(done, total):
        log.info("sweep: %d/%d cells", done, total)

    grid = run_sweep(spec, workers=args.workers, progress=progress)
    rows = ((fmt(a), fmt(b), fmt(j), int(ok), n) for a, b, j, ok, n in grid.rows())
    _write_csv(out / "grid.csv", ["axis1", "axis2", "J_ss", "converged", "rounds"], rows)
    summary = {
        "cells": int(grid.J_ss.size),
        "converged": int(grid.converged.sum()),
        "failed": len(grid.errors),
        "axis1": spec.axis1.name,
        "axis2": spec.axis2.name,
    }
    _write_manifest(out, "sweep", dump_sweep(spec), started, summary)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    started = time.perf_counter()
    data = load_json(args.config)
    data.pop("_stride", None)
    cfg, crit = parse_run(data)
    out = _outdir(args.out)
    rep = spectrum_report(cfg)
    rows = [("bare", k, fmt(e)) for k, e in enumerate(rep.eigenvalues_bare)]
    rows += [("coupled", k, fmt(e)) for k, e in enumerate(rep.eigenvalues_coupled)]
    _write_csv(out / "spectrum.csv", ["variant", "index", "eigenvalue"], rows)
    _write_manifest(out, "spectrum", dump_run(cfg, crit), started, {"levels": len(rows)})
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "spectrum": cmd_spectrum}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog=TOOL, description="Collision-model heat transport simulator")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("config", help="JSON config file (or a manifest.json to reproduce)")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--workers", type=int, default=None, help="max parallel sweep workers")
    ap.add_argument("--stride", type=int, default=None, help="record every K-th round")
    return ap


def _setup_logging() -> None:
    level = os.environ.get("COLLISIONFLUX_LOG", "error").upper()
    if level not in ("ERROR", "INFO", "DEBUG"):
        level = "ERROR"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    if args.stride is not None and args.stride < 1:
        print("error: --stride must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    if args.workers is not None and args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalIntegrityError as exc:
        print(f"numerical integrity error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
