"""Readers for the benchmark artifacts, with schema validation."""

import csv
import json
import math
from dataclasses import dataclass
from statistics import median
from typing import Dict, List, Optional, Tuple

GAP_FLOOR = 1e-12

TRACE_COLUMNS = ("run_id", "solver", "dist", "seed", "epoch",
                 "grad_evals", "objective", "gap", "wall_ms")
REFERENCE_SOLVER = "reference"

STUDY_KEYS = ("axis", "grid", "median_final_gap")
STUDY_AXES = ("sampling_m", "dimension_d")


class PlotInputError(Exception):
    """Input file is missing required structure or malformed."""


def _floor(gap: float) -> float:
    return gap if gap > GAP_FLOOR else GAP_FLOOR


@dataclass
class TraceRow:
    solver: str
    seed: int
    epoch: int
    gap: float


@dataclass
class TraceTable:
    """Solver rows of one traces.csv; the reference row is split out.

    The reference row carries the optimum witness, not a solver curve,
    so it never contributes a line to the figure.
    """

    rows: List[TraceRow]
    reference_objective: Optional[float]

    def solvers(self) -> List[str]:
        seen = []
        for row in self.rows:
            if row.solver not in seen:
                seen.append(row.solver)
        return seen

    def curve(self, solver: str) -> Tuple[List[int], List[float]]:
        """Epochs and the median floored gap over seeds, epoch-sorted."""
        by_epoch: Dict[int, List[float]] = {}
        for row in self.rows:
            if row.solver == solver:
                by_epoch.setdefault(row.epoch, []).append(_floor(row.gap))
        epochs = sorted(by_epoch)
        return epochs, [median(by_epoch[e]) for e in epochs]


def load_trace_table(path: str) -> TraceTable:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise PlotInputError(f"{path}: empty file, no CSV header")
        missing = [c for c in TRACE_COLUMNS if c not in reader.fieldnames]
        extra = [c for c in reader.fieldnames if c not in TRACE_COLUMNS]
        if missing:
            raise PlotInputError(
                f"{path}: missing columns: {', '.join(missing)}")
        if extra:
            raise PlotInputError(
                f"{path}: unexpected columns: {', '.join(extra)}")
        rows: List[TraceRow] = []
        reference_objective = None
        for lineno, rec in enumerate(reader, start=2):
            if None in rec.values() or None in rec:
                raise PlotInputError(f"{path}:{lineno}: ragged row")
            try:
                if rec["solver"] == REFERENCE_SOLVER:
                    reference_objective = float(rec["objective"])
                    continue
                row = TraceRow(solver=rec["solver"], seed=int(rec["seed"]),
                               epoch=int(rec["epoch"]), gap=float(rec["gap"]))
            except ValueError as exc:
                raise PlotInputError(f"{path}:{lineno}: {exc}") from exc
            if not math.isfinite(row.gap):
                raise PlotInputError(f"{path}:{lineno}: non-finite gap")
            rows.append(row)
    if not rows:
        raise PlotInputError(f"{path}: no solver rows")
    return TraceTable(rows=rows, reference_objective=reference_objective)


@dataclass
class StudyData:
    axis: str
    grid: List[float]
    gap: List[float]  # floored medians, parallel to grid


def load_study(path: str) -> StudyData:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PlotInputError(f"{path}: malformed JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise PlotInputError(f"{path}: top level is not an object")
    missing = [k for k in STUDY_KEYS if k not in payload]
    if missing:
        raise PlotInputError(f"{path}: missing keys: {', '.join(missing)}")
    axis = payload["axis"]
    if axis not in STUDY_AXES:
        raise PlotInputError(
            f"{path}: unknown axis {axis!r}, expected one of {STUDY_AXES}")
    grid, gaps = payload["grid"], payload["median_final_gap"]
    if not isinstance(grid, list) or not grid:
        raise PlotInputError(f"{path}: grid must be a nonempty list")
    if not isinstance(gaps, list):
        raise PlotInputError(f"{path}: median_final_gap must be a list")
    if len(gaps) != len(grid):
        raise PlotInputError(
            f"{path}: median_final_gap length {len(gaps)} != grid "
            f"length {len(grid)}")
    try:
        grid = [float(v) for v in grid]
        gaps = [_floor(float(v)) for v in gaps]
    except (TypeError, ValueError) as exc:
        raise PlotInputError(f"{path}: non-numeric entry: {exc}") from exc
    if not all(math.isfinite(v) for v in grid + gaps):
        raise PlotInputError(f"{path}: non-finite entry")
    return StudyData(axis=axis, grid=grid, gap=gaps)
