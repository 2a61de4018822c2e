"""Delimited-file ingestion of price or return columns."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np

from .core import DataError, Series
from .mes import BivariateSeries

__all__ = ["IngestConfig", "IngestResult", "ingest", "neg_log_returns", "read_columns"]

log = logging.getLogger(__name__)

MISSING = {"", "na", "nan", "null", "none", "."}


@dataclass(frozen=True)
class IngestConfig:
    path: Union[str, Path]
    column: Union[str, int] = 0
    transform: Literal["none", "neg_log_return"] = "none"
    delimiter: str = ","
    y_column: Optional[Union[str, int]] = None


@dataclass(frozen=True)
class IngestResult:
    data: Union[Series, BivariateSeries]
    dropped: int


def _resolve(header: list[str], column: Union[str, int]) -> int:
    if isinstance(column, int):
        idx = column
    elif column in header:
        return header.index(column)
    else:
        try:
            idx = int(column)
        except ValueError:
            raise DataError(f"column {column!r} not found in header {header}") from None
    if not 0 <= idx < len(header):
        raise DataError(f"column index {idx} out of range for {len(header)} columns")
    return idx


def read_columns(
    path: Union[str, Path], columns: list[Union[str, int]], delimiter: str = ","
) -> tuple[np.ndarray, int]:
    """Read numeric columns, dropping rows where any of them is missing.

    Returns the ``(rows, len(columns))`` array and the number of dropped rows.
    """
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh, delimiter=delimiter)
            try:
                header = [h.strip() for h in next(reader)]
            except StopIteration:
                raise DataError(f"{path}: empty file") from None
            idx = [_resolve(header, c) for c in columns]
            rows, dropped = [], 0
            for lineno, rec in enumerate(reader, start=2):
                if not rec or all(not f.strip() for f in rec):
                    continue
                fields = [rec[i].strip() if i < len(rec) else "" for i in idx]
                if any(f.lower() in MISSING for f in fields):
                    dropped += 1
                    continue
                try:
                    rows.append([float(f) for f in fields])
                except ValueError:
                    raise DataError(f"{path}:{lineno}: cannot parse {fields!r} as numbers") from None
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None
    arr = np.array(rows, dtype=float).reshape(-1, len(columns))
    return arr, dropped


def neg_log_returns(prices: np.ndarray) -> np.ndarray:
    """``-log(P_{t+1} / P_t)`` for consecutive prices."""
    prices = np.asarray(prices, dtype=float)
    if np.any(prices <= 0):
        raise DataError("prices must be strictly positive for log returns")
    return -np.diff(np.log(prices))


def ingest(cfg: IngestConfig) -> IngestResult:
    """Load a :class:`Series`, or a :class:`BivariateSeries` when ``y_column`` is set.

    Rows with a missing value are dropped before any transform and the
    count is logged.
    """
    columns = [cfg.column] if cfg.y_column is None else [cfg.column, cfg.y_column]
    arr, dropped = read_columns(cfg.path, columns, cfg.delimiter)
    if dropped:
        log.warning("%s: dropped %d row(s) with missing values", cfg.path, dropped)
    if cfg.transform == "neg_log_return":
        if arr.shape[0] < 2:
            raise DataError("need at least 2 usable prices")
        arr = np.column_stack([neg_log_returns(arr[:, i]) for i in range(arr.shape[1])])
    elif cfg.transform != "none":
        raise ValueError(f"unknown transform {cfg.transform!r}")
    if arr.shape[0] < 2 and cfg.transform == "none":
        raise DataError("need at least 2 usable rows")
    if cfg.y_column is None:
        return IngestResult(Series(arr[:, 0]), dropped)
    return IngestResult(BivariateSeries(arr[:, 0], arr[:, 1]), dropped)
