"""Unit tests for locale-independent CSV serialization."""

from __future__ import annotations

import io
import math
from pathlib import Path

import pytest

from shuffle_privacy.domain.privacy import CertifiedBy
from shuffle_privacy.infrastructure.csv_output import format_value, write_csv, write_csv_file


@pytest.mark.parametrize(
    ("value", "expected"),
    [
        (0.1, "0.10000000000000001"),
        (1e-6, "9.9999999999999995e-07"),
        (1234567.0, "1234567"),
        (math.inf, "inf"),
        (-math.inf, "-inf"),
        (math.nan, "nan"),
        (100_000, "100000"),
        (True, "true"),
        (CertifiedBy.CLAMP, "clamp"),
        ("bennett-rr", "bennett-rr"),
    ],
)
def test_format_value(value: float | int | str | CertifiedBy, expected: str) -> None:
    assert format_value(value) == expected


def test_formatted_reals_round_trip_exactly() -> None:
    for value in (math.log(3.0), 1 / 3, 2.0**-40, 0.028205990101):
        assert float(format_value(value)) == value


def test_write_csv_uses_header_and_newline_only() -> None:
    stream = io.StringIO()

    write_csv(stream, ("n", "epsilon"), [(10, 0.5), (20, 0.25)])

    assert stream.getvalue() == "n,epsilon\n10,0.5\n20,0.25\n"


def test_write_csv_rejects_ragged_rows() -> None:
    with pytest.raises(ValueError, match="expected 2"):
        write_csv(io.StringIO(), ("n", "epsilon"), [(10,)])


def test_write_csv_file_writes_utf8_with_unix_newlines(tmp_path: Path) -> None:
    path = tmp_path / "rows.csv"

    write_csv_file(path, ("method",), [("hoeffding-rr",)])

    assert path.read_bytes() == b"method\nhoeffding-rr\n"
