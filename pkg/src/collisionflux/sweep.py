"""Steady-state flux over two-parameter grids.

Every cell is an independent run from the thermal initial register, so the
grid does not depend on evaluation order or on the number of workers.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .engine import SteadyStateCriterion, run
from .errors import ConfigError, NumericalIntegrityError
from .model import ModelConfig

log = logging.getLogger(__name__)

SWEEPABLE = ("ga", "gb", "p", "g12", "g23", "Th", "Tc")


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.name not in SWEEPABLE:
            raise ConfigError(f"axis name '{self.name}' not in {SWEEPABLE}")
        if isinstance(self.count, bool) or int(self.count) != self.count or self.count < 1:
            raise ConfigError(f"axis '{self.name}': count must be a positive integer")
        object.__setattr__(self, "count", int(self.count))
        if self.min > self.max:
            raise ConfigError(f"axis '{self.name}': min {self.min} > max {self.max}")
        if self.count == 1 and self.min != self.max:
            raise ConfigError(f"axis '{self.name}': a single point needs min == max")
        if self.name == "p" and not (0 <= self.min and self.max <= 1):
            raise ConfigError("axis 'p': bounds must lie in [0, 1]")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class SweepSpec:
    base: ModelConfig
    axis1: Axis
    axis2: Axis
    criterion: SteadyStateCriterion = field(default_factory=SteadyStateCriterion)

    def __post_init__(self):
        if self.axis1.name == self.axis2.name:
            raise ConfigError(f"both axes sweep '{self.axis1.name}'")

    def cell_config(self, v1: float, v2: float) -> ModelConfig:
        return self.base.replace(**{self.axis1.name: float(v1), self.axis2.name: float(v2)})

    def transposed(self) -> "SweepSpec":
        return SweepSpec(self.base, self.axis2, self.axis1, self.criterion)


@dataclass
class SweepGrid:
    """Row index follows axis1, column index axis2."""

    axis1: np.ndarray
    axis2: np.ndarray
    J_ss: np.ndarray
    converged: np.ndarray
    rounds: np.ndarray
    errors: dict = field(default_factory=dict)

    def rows(self):
        for i, a in enumerate(self.axis1):
            for j, b in enumerate(self.axis2):
                yield float(a), float(b), float(self.J_ss[i, j]), bool(self.converged[i, j]), int(self.rounds[i, j])


def _cell(args):
    i, j, cfg, crit = args
    try:
        tr = run(cfg, crit)
    except NumericalIntegrityError as exc:
        return i, j, np.nan, False, 0, str(exc)
    return i, j, tr.J_ss, tr.steady, tr.rounds, None


def run_sweep(spec: SweepSpec, workers: int | None = None, progress=None) -> SweepGrid:
    """Evaluate J_ss on every grid cell, in parallel when ``workers`` > 1.

    ``progress(done, total)`` is called as cells finish, in completion order.
    Integrity failures mark the cell unconverged with J_ss = NaN instead of
    aborting.
    """
    a1, a2 = spec.axis1.values, spec.axis2.values
    tasks = [
        (i, j, spec.cell_config(v1, v2), spec.criterion)
        for i, v1 in enumerate(a1)
        for j, v2 in enumerate(a2)
    ]
    shape = (len(a1), len(a2))
    grid = SweepGrid(a1, a2, np.full(shape, np.nan), np.zeros(shape, bool), np.zeros(shape, int))
    workers = workers or os.cpu_count() or 1
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            results = pool.map(_cell, tasks, chunksize=1)
            _collect(grid, results, len(tasks), progress)
    else:
        _collect(grid, map(_cell, tasks), len(tasks), progress)
    return grid


def _collect(grid, results, total, progress):
    for done, (i, j, jss, ok, n, err) in enumerate(results, 1):
        grid.J_ss[i, j] = jss
        grid.converged[i, j] = ok
        grid.rounds[i, j] = n
        if err:
            grid.errors[(i, j)] = err
            log.error("cell (%d, %d): %s", i, j, err)
        if progress:
            progress(done, total)
