"""CSV loading and provenance helpers shared by the figure scripts."""

from __future__ import annotations

import csv
import hashlib
from pathlib import Path


class SchemaError(Exception):
    """Input CSV is malformed or missing required columns (exit code 2)."""


def sha256_of(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_columns(path: Path, required: tuple[str, ...]) -> dict[str, list[str]]:
    """Read a CSV into string columns, enforcing required column names."""
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"input CSV not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        missing = [name for name in required if name not in header]
        if missing:
            raise SchemaError(f"{path}: missing required columns {missing} (header: {header})")
        columns: dict[str, list[str]] = {name: [] for name in header}
        for row in reader:
            if len(row) != len(header):
                raise SchemaError(f"{path}: row with {len(row)} cells, expected {len(header)}")
            for name, cell in zip(header, row):
                columns[name].append(cell)
    if not columns[required[0]]:
        raise SchemaError(f"{path}: no data rows")
    return columns


def floats(cells: list[str], column: str) -> list[float]:
    """Parse cells to floats; the token 'inf' is honored, NaN is rejected."""
    out = []
    for cell in cells:
        if cell == "inf":
            out.append(float("inf"))
            continue
        try:
            value = float(cell)
        except ValueError:
            raise SchemaError(f"column {column!r}: non-numeric cell {cell!r}") from None
        if value != value:
            raise SchemaError(f"column {column!r}: NaN cell")
        out.append(value)
    return out
