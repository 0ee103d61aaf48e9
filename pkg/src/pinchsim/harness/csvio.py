"""Deterministic CSV emission (RFC-4180 quoting, UTF-8, LF line endings)."""

from __future__ import annotations

import csv
from pathlib import Path


def _render(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


def write_csv(path, header: list[str], rows: list[dict]) -> None:
    """Write rows in header order; floats use shortest round-trip repr."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_render(row.get(col)) for col in header])


def read_csv(path) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
