"""Locale-independent CSV serialization of result rows."""

from __future__ import annotations

import csv
import math
from collections.abc import Iterable, Sequence
from enum import Enum
from pathlib import Path
from typing import TextIO

CsvValue = int | float | str | Enum


def format_value(value: CsvValue) -> str:
    """Render reals with 17 significant digits so they round-trip exactly."""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return value


def write_csv(
    stream: TextIO, columns: Sequence[str], rows: Iterable[Sequence[CsvValue]]
) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"Row has {len(row)} fields, expected {len(columns)}.")
        writer.writerow([format_value(value) for value in row])


def write_csv_file(
    path: Path, columns: Sequence[str], rows: Iterable[Sequence[CsvValue]]
) -> None:
    """Write UTF-8 CSV with \\n line endings on every platform."""
    with path.open("w", encoding="utf-8", newline="") as handle:
        write_csv(handle, columns, rows)
