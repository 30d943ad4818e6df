"""Experiment registry, configuration, execution and report serialization."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .rng import stream

Scalar = int | float | str | bool


class UnknownExperimentError(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unknown experiment: {self.name!r}"


class BadParameterError(ValueError):
    def __init__(self, key: str, reason: str = ""):
        self.key = key
        msg = f"bad parameter: {key}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


@dataclass(frozen=True)
class Param:
    kind: str  # int, float, str, bool, ints, floats
    default: Any
    help: str = ""


def _parse_scalar(kind: str, raw: Any) -> Any:
    if kind == "int":
        if isinstance(raw, bool):
            raise ValueError("boolean given")
        if isinstance(raw, int):
            return raw
        text = str(raw).strip()
        try:
            return int(text)
        except ValueError:
            value = float(text)
            if not value.is_integer():
                raise
            return int(value)
    if kind == "float":
        if isinstance(raw, bool):
            raise ValueError("boolean given")
        value = float(raw)
        if math.isnan(value):
            raise ValueError("nan")
        return value
    if kind == "bool":
        if isinstance(raw, bool):
            return raw
        text = str(raw).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if kind == "str":
        return str(raw)
    if kind in ("ints", "floats"):
        item = "int" if kind == "ints" else "float"
        if isinstance(raw, (list, tuple)):
            parts = list(raw)
        else:
            parts = [p for p in str(raw).split(",") if p.strip()]
        if not parts:
            raise ValueError("empty list")
        return tuple(_parse_scalar(item, p) for p in parts)
    raise ValueError(f"unknown parameter kind {kind}")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_name: str
    parameters: dict[str, Scalar] = field(default_factory=dict)
    seed: int = 0
    trials: int = 1
    output_path: str | None = None
    output_format: str = "csv"

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise BadParameterError("trials", "must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise BadParameterError("seed", "must be a 64-bit unsigned integer")
        if self.output_format not in ("csv", "json"):
            raise BadParameterError("format", "must be csv or json")

    def echo(self) -> dict[str, Any]:
        return {
            "experiment_name": self.experiment_name,
            "parameters": {k: self.parameters[k] for k in sorted(self.parameters)},
            "seed": self.seed,
            "trials": self.trials,
        }


class Context:
    """What an experiment body sees: parsed parameters, seeding and a trial mapper."""

    def __init__(self, config: ExperimentConfig, params: dict[str, Any], threads: int):
        self.config = config
        self.params = params
        self.seed = config.seed
        self.trials = config.trials
        self.threads = threads

    def rng(self, trial: int, lane: int = 0) -> np.random.Generator:
        return stream(self.seed, trial, lane)

    def map(self, fn: Callable[[Any], Any], items: Sequence[Any]) -> list[Any]:
        """Apply ``fn`` to ``items`` (possibly concurrently); results keep input order."""
        items = list(items)
        if self.threads <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=min(self.threads, len(items))) as pool:
            return list(pool.map(fn, items))


@dataclass
class Outcome:
    rows: list[dict[str, Any]]
    pass_flags: dict[str, bool]


@dataclass(frozen=True)
class Experiment:
    name: str
    columns: tuple[str, ...]
    params: dict[str, Param]
    body: Callable[[Context], Outcome]
    description: str = ""
    flags: tuple[str, ...] = ()

    def parse(self, raw: dict[str, Any]) -> dict[str, Any]:
        parsed = {k: p.default for k, p in self.params.items()}
        for key, value in raw.items():
            norm = key.replace("-", "_")
            if norm not in self.params:
                raise BadParameterError(key, f"not a parameter of {self.name}")
            try:
                parsed[norm] = _parse_scalar(self.params[norm].kind, value)
            except (TypeError, ValueError) as exc:
                raise BadParameterError(key, str(exc)) from None
        return parsed


@dataclass
class Report:
    config: ExperimentConfig
    columns: tuple[str, ...]
    rows: list[dict[str, Any]]
    pass_flags: dict[str, bool]
    wall_time_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.pass_flags.values())

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_cell(row.get(c)) for c in self.columns])
        return buf.getvalue()

    def to_json(self, include_timing: bool = False) -> str:
        doc: dict[str, Any] = {
            "config": self.config.echo(),
            "columns": list(self.columns),
            "pass_flags": {k: bool(v) for k, v in self.pass_flags.items()},
            "rows": [{c: _json_value(row.get(c)) for c in self.columns} for row in self.rows],
        }
        if include_timing:
            doc["wall_time_seconds"] = self.wall_time_seconds
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    def serialize(self, fmt: str | None = None) -> str:
        fmt = fmt or self.config.output_format
        return self.to_csv() if fmt == "csv" else self.to_json()


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isfinite(value):
            return value
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    return value


_REGISTRY: dict[str, Experiment] = {}


def register(
    name: str,
    columns: Iterable[str],
    params: dict[str, Param],
    description: str = "",
    flags: Iterable[str] = (),
) -> Callable[[Callable[[Context], Outcome]], Callable[[Context], Outcome]]:
    def deco(fn: Callable[[Context], Outcome]) -> Callable[[Context], Outcome]:
        if name in _REGISTRY:
            raise ValueError(f"duplicate experiment {name}")
        _REGISTRY[name] = Experiment(name, tuple(columns), dict(params), fn, description, tuple(flags))
        return fn

    return deco


def _load() -> None:
    from . import experiments  # noqa: F401  (registers on import)


def list_experiments() -> list[str]:
    _load()
    return sorted(_REGISTRY)


def get_experiment(name: str) -> Experiment:
    _load()
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownExperimentError(name) from None


def thread_count() -> int:
    raw = os.environ.get("RESULTLAB_THREADS")
    cpus = os.cpu_count() or 1
    if raw is None or not raw.strip():
        return cpus
    try:
        value = int(raw)
    except ValueError:
        raise BadParameterError("RESULTLAB_THREADS", "not an integer") from None
    return max(1, value)


def run_experiment(config: ExperimentConfig) -> Report:
    """Run one experiment.  The serialized report depends only on ``config``."""
    exp = get_experiment(config.experiment_name)
    params = exp.parse(dict(config.parameters))
    ctx = Context(config, params, thread_count())
    start = time.perf_counter()
    outcome = exp.body(ctx)
    elapsed = time.perf_counter() - start
    missing = [f for f in exp.flags if f not in outcome.pass_flags]
    if missing:
        raise RuntimeError(f"{exp.name} did not report flags {missing}")
    report = Report(config, exp.columns, outcome.rows, dict(outcome.pass_flags), elapsed)
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(report.serialize())
    return report
