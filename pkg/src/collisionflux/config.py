"""JSON (de)serialisation of run, spectrum and sweep configurations.

Field names are exactly those of :class:`ModelConfig`,
:class:`SteadyStateCriterion`, :class:`SweepSpec` and :class:`Axis`; any
other key is rejected so that typos never pass silently.
"""
from __future__ import annotations

import dataclasses
import json
from pathlib import Path

from .engine import SteadyStateCriterion
from .errors import ConfigError
from .model import ModelConfig
from .sweep import Axis, SweepSpec

TOOL = "collisionflux"


def _build(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {unknown}; allowed {sorted(names)}")
    try:
        return cls(**data)
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _check_keys(data, allowed, where):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a JSON object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {unknown}; allowed {sorted(allowed)}")


def parse_run(data: dict) -> tuple[ModelConfig, SteadyStateCriterion]:
    """``{"model": {...}, "criterion": {...}}``; both sections optional."""
    _check_keys(data, ("model", "criterion"), "config")
    return (
        _build(ModelConfig, data.get("model", {}), "model"),
        _build(SteadyStateCriterion, data.get("criterion", {}), "criterion"),
    )


def parse_sweep(data: dict) -> SweepSpec:
    _check_keys(data, ("base", "axis1", "axis2", "criterion"), "config")
    for key in ("axis1", "axis2"):
        if key not in data:
            raise ConfigError(f"config: missing field '{key}'")
    return SweepSpec(
        base=_build(ModelConfig, data.get("base", {}), "base"),
        axis1=_build(Axis, data["axis1"], "axis1"),
        axis2=_build(Axis, data["axis2"], "axis2"),
        criterion=_build(SteadyStateCriterion, data.get("criterion", {}), "criterion"),
    )


def dump_run(cfg: ModelConfig, crit: SteadyStateCriterion) -> dict:
    return {"model": dataclasses.asdict(cfg), "criterion": dataclasses.asdict(crit)}


def dump_sweep(spec: SweepSpec) -> dict:
    return {
        "base": dataclasses.asdict(spec.base),
        "axis1": dataclasses.asdict(spec.axis1),
        "axis2": dataclasses.asdict(spec.axis2),
        "criterion": dataclasses.asdict(spec.criterion),
    }


def load_json(path: str | Path) -> dict:
    """Read a config (or a manifest written by a previous run).

    A manifest is recognised by its ``tool`` key; its embedded ``config`` is
    returned together with the recorded stride under ``"_stride"``.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if isinstance(data, dict) and data.get("tool") == TOOL and "config" in data:
        cfg = dict(data["config"])
        if "stride" in data:
            cfg["_stride"] = data["stride"]
        return cfg
    return data
