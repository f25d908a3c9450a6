"""Parameter sweeps over a design, producing the tabular data behind sensitivity plots."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

from .collective import special_weighting
from .config import DesignConfig
from .errors import ConfigError, SSDError
from .posterior import UnknownVariance
from .ssd import ACC, ALC, APVC, SSDResult, optimal_benchmark, solve

__all__ = ["AXES", "MODES", "SweepSpec", "SweepRow", "parse_mode", "run_sweep", "rows_to_csv", "CSV_COLUMNS"]

AXES = ("alpha", "l0", "l", "eps0", "c", "a02", "b02")
MODES = ("robust", "no_robustification", "no_borrowing", "single_source", "optimal")
CSV_COLUMNS = ("axis_name", "axis_value", "mode", "criterion", "real_total", "nA", "nB", "achieved")


def parse_mode(mode: str) -> tuple[str, int | None]:
    """Split ``single_source:3`` into ``("single_source", 3)``."""
    name, _, index = mode.partition(":")
    if name not in MODES:
        raise ConfigError(f"modes: unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    if index:
        if name != "single_source" or not index.isdigit():
            raise ConfigError(f"modes: only single_source takes an index (single_source:K), got {mode!r}")
        return name, int(index)
    return name, None


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple[float, ...]
    modes: tuple[str, ...] = ("robust",)

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"axis: unknown axis {self.axis!r}; expected one of {', '.join(AXES)}")
        if len(self.values) == 0:
            raise ConfigError("values: at least one value is required")
        for v in self.values:
            if not math.isfinite(v):
                raise ConfigError(f"values: {v!r} is not finite")
        if len(self.modes) == 0:
            raise ConfigError("modes: at least one mode is required")
        for m in self.modes:
            parse_mode(m)


@dataclass(frozen=True)
class SweepRow:
    axis_name: str
    axis_value: float
    mode: str
    criterion: str
    result: SSDResult

    def as_record(self) -> dict:
        r = self.result
        real_total = r.real_total if r.real_total is not None else float(r.total)
        return {
            "axis_name": self.axis_name,
            "axis_value": repr(float(self.axis_value)),
            "mode": self.mode,
            "criterion": self.criterion,
            "real_total": f"{real_total:.6f}",
            "nA": str(r.nA),
            "nB": str(r.nB),
            "achieved": f"{r.achieved:.6f}",
        }


def _apply_axis(config: DesignConfig, axis: str, value: float):
    """Domain objects of ``config`` with one parameter overridden."""
    hyper = config.gamma_hyper()
    vm = config.variance_model()
    criteria = config.criteria_objects()
    try:
        if axis == "c":
            vm = UnknownVariance(value)
            if value <= 2 and any(isinstance(c, (ACC, APVC)) for c in criteria):
                raise ConfigError(
                    f"values: c={value} <= 2 leaves E[sigma0^2] undefined, required by ACC/APVC"
                )
        elif axis in ("a02", "b02"):
            hyper = hyper.replace(**{axis: value})
            hyper.require_moments()
        elif axis == "alpha":
            criteria = [
                replace(c, alpha=value) if isinstance(c, ACC)
                else replace(c, alpha0=value) if isinstance(c, ALC) else c
                for c in criteria
            ]
        elif axis == "l0":
            criteria = [replace(c, l0=value) if isinstance(c, ACC) else c for c in criteria]
        elif axis == "l":
            criteria = [replace(c, l=value) if isinstance(c, ALC) else c for c in criteria]
        elif axis == "eps0":
            criteria = [replace(c, eps0=value) if isinstance(c, APVC) else c for c in criteria]
    except SSDError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"values: {axis}={value}: {exc}") from None
    return hyper, vm, criteria


def run_sweep(config: DesignConfig, spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Solve every (axis value, mode, criterion) cell.

    Rows come back ordered by axis value, then mode, then criterion as
    listed in the config, regardless of ``workers``.
    """
    sources = config.historical()
    rule = config.rule()
    alloc = config.allocation_rule()
    tasks = []
    for value in spec.values:
        hyper, vm, criteria = _apply_axis(config, spec.axis, value)
        for mode in spec.modes:
            name, k = parse_mode(mode)
            if k is not None and not 1 <= k <= len(sources):
                raise ConfigError(f"modes: {mode!r} index out of range 1..{len(sources)}")
            for crit in criteria:
                tasks.append((value, mode, name, k, hyper, vm, crit))

    def one(task):
        value, mode, name, k, hyper, vm, crit = task
        if name == "optimal":
            prior = special_weighting(sources, hyper, rule, "robust")
            result = optimal_benchmark(prior, crit, alloc)
        else:
            prior = special_weighting(sources, hyper, rule, name, k)
            result = solve(prior, crit, vm, alloc)
        return SweepRow(spec.axis, value, mode, crit.kind, result)

    if workers <= 1:
        return [one(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, tasks))


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_record())
    return buf.getvalue()
