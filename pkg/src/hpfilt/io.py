"""
Reading price series from CSV and writing decompositions.

CSV input needs a header row.  The value column defaults to ``Close`` and
the date column to ``Date`` (used only when present).  Output numbers use
Python's shortest round-trip float formatting, so reading a written column
back gives the identical doubles.
"""
from __future__ import annotations

import csv
import datetime as dt
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import (DomainError, OrderingError, ParseError, SchemaError)
from .filters import Decomposition, SohpResult

__all__ = ["SeriesRecord", "read_csv", "log_transform", "write_decomposition",
           "decomposition_table", "read_column"]

_MISSING = {"", "null", "nan", "na", "n/a", "none", "."}


@dataclass(frozen=True)
class SeriesRecord:
    value: float
    date: dt.date | None = None


def _open_text(source, mode):
    if hasattr(source, "read") or hasattr(source, "write"):
        return source, False
    return open(source, mode, newline="", encoding="utf-8"), True


def _parse_date(text: str, row: int) -> dt.date:
    text = text.strip()
    try:
        return dt.date.fromisoformat(text[:10])
    except ValueError:
        raise ParseError(f"row {row}: cannot parse date {text!r}", row) from None


def read_csv(source, value_column: str = "Close",
             date_column: str | None = "Date",
             require_dates: bool = False) -> list[SeriesRecord]:
    """
    Parse a header-bearing CSV into records, in file order.

    ``date_column`` is optional: if the header lacks it and
    ``require_dates`` is false, records carry no date.  Row numbers in
    errors count data rows from 1.
    """
    fh, close = _open_text(source, "r")
    try:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError("empty CSV file") from None
        if value_column not in header:
            raise SchemaError(
                f"column {value_column!r} not found in header {header}")
        vi = header.index(value_column)
        di = None
        if date_column is not None:
            if date_column in header:
                di = header.index(date_column)
            elif require_dates:
                raise SchemaError(
                    f"column {date_column!r} not found in header {header}")

        records = []
        for row, cells in enumerate(reader, start=1):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) <= max(vi, di if di is not None else 0):
                raise ParseError(f"row {row}: too few fields", row)
            text = cells[vi].strip()
            if text.lower() in _MISSING:
                raise ParseError(f"row {row}: missing value {text!r}", row)
            try:
                value = float(text)
            except ValueError:
                raise ParseError(
                    f"row {row}: non-numeric value {text!r}", row) from None
            if not math.isfinite(value):
                raise ParseError(f"row {row}: non-finite value {text!r}", row)
            date = _parse_date(cells[di], row) if di is not None else None
            if date is not None and records and records[-1].date >= date:
                raise OrderingError(
                    f"row {row}: date {date} does not follow {records[-1].date}")
            records.append(SeriesRecord(value, date))
    finally:
        if close:
            fh.close()
    if not records:
        raise ParseError("no data rows")
    return records


def log_transform(records) -> np.ndarray:
    """Natural log of record values (plain numbers are accepted too)."""
    values = np.array([getattr(r, "value", r) for r in records], dtype=float)
    bad = np.flatnonzero(~(values > 0))
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"log of non-positive value {values[i]!r} at index {i}", i)
    return np.log(values)


def _fmt(x) -> str:
    return repr(float(x))


def decomposition_table(result, dates=None):
    """Return ``(columns, rows)`` for a Decomposition or SohpResult."""
    if isinstance(result, SohpResult):
        dec = result.decomposition
        stages = result.stage_trends
    elif isinstance(result, Decomposition):
        dec = result
        stages = []
    else:
        raise TypeError(f"cannot serialize {type(result).__name__}")
    columns = ["t"]
    if dates is not None:
        if len(dates) != len(dec):
            raise ValueError("dates and observations differ in length")
        columns.append("date")
    columns += ["y", "trend", "cycle"]
    columns += [f"stage_trend_{i}" for i in range(1, len(stages) + 1)]

    rows = []
    for k in range(len(dec)):
        row = [k + 1]
        if dates is not None:
            row.append(dates[k].isoformat() if dates[k] is not None else "")
        row += [dec.observations[k], dec.trend[k], dec.cycle[k]]
        row += [g[k] for g in stages]
        rows.append(row)
    return columns, rows


def write_decomposition(result, destination, format: str = "csv",
                        dates=None, metadata=None) -> None:
    """
    Write a decomposition as CSV or JSON.

    CSV columns are ``t, [date,] y, trend, cycle`` plus ``stage_trend_i``
    for SOHP results.  JSON holds the same columns as arrays under
    ``"columns"``, and for SOHP also ``chosen_n``, ``si_values`` and
    ``degenerate``.  ``metadata`` entries are merged into the JSON object.
    """
    columns, rows = decomposition_table(result, dates)
    fh, close = _open_text(destination, "w")
    try:
        if format == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([c if isinstance(c, (int, str)) else _fmt(c)
                            for c in row])
        elif format == "json":
            obj = dict(metadata or {})
            obj["length"] = len(rows)
            obj["columns"] = {name: [row[j] for row in rows]
                              for j, name in enumerate(columns)}
            for name in columns:
                if name not in ("t", "date"):
                    obj["columns"][name] = [float(v) for v in obj["columns"][name]]
            if isinstance(result, SohpResult):
                obj["chosen_n"] = result.chosen_n
                obj["si_values"] = [float(v) for v in result.si_values]
                obj["degenerate"] = result.degenerate
            json.dump(obj, fh, indent=1, allow_nan=False)
            fh.write("\n")
        else:
            raise ValueError(f"unknown format {format!r}")
    finally:
        if close:
            fh.close()


def read_column(source, column: str = "y") -> np.ndarray:
    """Read one numeric column back from a CSV or JSON written above."""
    path = Path(source) if not hasattr(source, "read") else None
    if path is not None and path.suffix == ".json":
        with open(path, encoding="utf-8") as fh:
            return np.array(json.load(fh)["columns"][column], dtype=float)
    records = read_csv(source, value_column=column, date_column=None)
    return np.array([r.value for r in records])
