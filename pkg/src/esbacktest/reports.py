"""CSV input/output and machine-readable run reports."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .comparative import ComparativeResult, ForecastSeries
from .sim import TESTS, ReplicationOutcome, ZoneSummary
from .traditional import CoverageResult

__all__ = [
    "InputError",
    "read_columns",
    "series_from_columns",
    "write_series_csv",
    "write_outcomes_csv",
    "read_outcomes_csv",
    "Report",
]

SERIES_COLUMNS = ("x", "v", "e", "v_star", "e_star", "pit")

Result = Union[ComparativeResult, CoverageResult, ZoneSummary]
_KINDS = {
    "comparative": ComparativeResult,
    "coverage": CoverageResult,
    "zone_summary": ZoneSummary,
}


class InputError(ValueError):
    """Malformed or incomplete input table."""


def fmt(value: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(value), ".17g")


def read_columns(path, required: Iterable[str], optional: Iterable[str] = ()) -> dict[str, np.ndarray]:
    """Read the named columns of a headed CSV file as float arrays.

    Columns are bound by header name; unknown columns are ignored.
    """
    required = tuple(required)
    wanted = required + tuple(optional)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        missing = [c for c in required if c not in header]
        if missing:
            raise InputError(f"{path}: missing column(s) {', '.join(missing)}")
        index = {c: header.index(c) for c in wanted if c in header}
        values: dict[str, list[float]] = {c: [] for c in index}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            for col, i in index.items():
                try:
                    cell = float(row[i])
                except (IndexError, ValueError):
                    raise InputError(f"{path}:{lineno}: bad value in column {col!r}") from None
                if not math.isfinite(cell):
                    raise InputError(f"{path}:{lineno}: non-finite value in column {col!r}")
                values[col].append(cell)
    return {c: np.asarray(v, dtype=float) for c, v in values.items()}


def series_from_columns(cols: dict[str, np.ndarray], need_es: bool = True) -> ForecastSeries:
    if need_es:
        return ForecastSeries(cols["x"], cols["v"], cols["e"], cols["v_star"], cols["e_star"])
    return ForecastSeries(cols["x"], cols["v"], None, cols["v_star"], None)


def write_series_csv(path, series: ForecastSeries, pits=None) -> None:
    columns = {"x": series.x, "v": series.v}
    if series.has_es:
        columns["e"] = series.e
    columns["v_star"] = series.v_star
    if series.has_es:
        columns["e_star"] = series.e_star
    if pits is not None:
        columns["pit"] = np.asarray(pits, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in zip(*columns.values()):
            writer.writerow([fmt(val) for val in row])


def write_outcomes_csv(path, outcomes: Iterable[ReplicationOutcome]) -> None:
    """One row per replication: zone and statistic of every test."""
    header = ["rep"]
    for test in TESTS:
        header += [f"{test}_zone", f"{test}_stat"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for out in outcomes:
            row = [str(out.rep_index)]
            for test in TESTS:
                res = getattr(out, test)
                stat = res.t2 if isinstance(res, ComparativeResult) else res.statistic
                row += [res.zone.value, fmt(stat)]
            writer.writerow(row)


def read_outcomes_csv(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@dataclass(frozen=True)
class Report:
    """A result plus the metadata needed to reproduce it."""

    command: str
    config: dict
    result: Result
    version: str = field(default="")

    def __post_init__(self) -> None:
        if not self.version:
            from . import __version__

            object.__setattr__(self, "version", __version__)

    @property
    def kind(self) -> str:
        for name, cls in _KINDS.items():
            if isinstance(self.result, cls):
                return name
        raise TypeError(f"unsupported result {type(self.result).__name__}")

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "version": self.version,
            "config": self.config,
            "kind": self.kind,
            "result": self.result.to_dict(),
        }

    def to_json(self) -> str:
        # repr-based float encoding in json is lossless
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        data = json.loads(text)
        result = _KINDS[data["kind"]].from_dict(data["result"])
        return cls(
            command=data["command"],
            config=data["config"],
            result=result,
            version=data["version"],
        )

    @classmethod
    def load(cls, path) -> "Report":
        return cls.from_json(Path(path).read_text())
