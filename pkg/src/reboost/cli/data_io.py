"""CSV interchange: datasets (header + numeric rows, target last), trained
reports (one row per method) and per-iteration traces."""

from __future__ import annotations

import csv
import warnings

import numpy as np

from reboost.core import Dataset, InvalidInputError, Task
from reboost.harness import ExperimentReport, MethodResult

REPORT_COLUMNS = ("method", "mean_metric", "stderr", "chosen_params", "chosen_k", "runs")
TRACE_COLUMNS = ("k", "beta", "alpha", "empirical_risk")


class CsvParseError(ValueError):
    """Malformed dataset CSV; message carries the row/column location."""


def load_dataset_csv(path, task: Task) -> Dataset:
    """Read a rectangular numeric CSV: header row, target in the last column.

    Classification targets may be {-1, +1} or {0, 1}; a 0/1 column is
    remapped to -1/+1 with a warning.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvParseError(f"{path}: empty file") from None
        width = len(header)
        if width < 2:
            raise CsvParseError(f"{path}: need at least one feature and a target column")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise CsvParseError(
                    f"{path}:{lineno}: expected {width} columns, found {len(row)}"
                )
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                bad = next(i for i, cell in enumerate(row) if not _is_number(cell))
                raise CsvParseError(
                    f"{path}:{lineno}: column {bad + 1} ({header[bad]!r}) is not numeric: "
                    f"{row[bad]!r}"
                ) from None
    if not rows:
        raise CsvParseError(f"{path}: no data rows")
    table = np.array(rows)
    features, targets = table[:, :-1], table[:, -1]
    if task is Task.CLASSIFICATION and set(np.unique(targets)) <= {0.0, 1.0}:
        warnings.warn(f"{path}: remapping {{0,1}} labels to {{-1,+1}}")
        targets = 2.0 * targets - 1.0
    return Dataset(features, targets, task)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def save_dataset_csv(path, data: Dataset, feature_names=None) -> None:
    names = feature_names or [f"x{i + 1}" for i in range(data.n_features)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(names) + ["target"])
        for row, y in zip(data.features, data.targets):
            writer.writerow([f"{v:.17g}" for v in row] + [f"{y:.17g}"])


def save_report_csv(path, report: ExperimentReport) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for row in report.rows:
            writer.writerow([
                row.method, f"{row.mean_metric:.17g}", f"{row.stderr:.17g}",
                row.chosen_params, row.chosen_k, row.runs,
            ])


def load_report_csv(path) -> ExperimentReport:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != REPORT_COLUMNS:
            raise InvalidInputError(f"{path}: not a report CSV")
        rows = tuple(
            MethodResult(method, float(mean), float(stderr), params,
                         int(k), int(runs))
            for method, mean, stderr, params, k, runs in reader
        )
    total = max((r.runs for r in rows), default=0)
    return ExperimentReport(rows, total, seeds=())


def save_trace_csv(path, trace) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for rec in trace.records:
            writer.writerow([rec.k, f"{rec.beta:.17g}", f"{rec.alpha:.17g}",
                             f"{rec.risk:.17g}"])
