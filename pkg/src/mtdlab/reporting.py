"""Delimited-output conventions shared by every report command.

All CSV artifacts follow one format: '#'-prefixed metadata comment
lines, then the header row, then data rows; '.' decimal separator and
LF line endings.  Files are written atomically (temp file + rename) so
a failing run never leaves a partial artifact behind.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence, Union

Cell = Union[int, float, str]


@dataclass(frozen=True)
class Table:
    """An in-memory report: metadata comments, header, data rows."""

    comments: tuple[str, ...]
    header: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]


def format_cell(value: Cell) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def render_csv(table: Table) -> str:
    lines = [f"# {c}" for c in table.comments]
    lines.append(",".join(table.header))
    for row in table.rows:
        if len(row) != len(table.header):
            raise ValueError(f"row width {len(row)} != header width {len(table.header)}")
        lines.append(",".join(format_cell(cell) for cell in row))
    return "\n".join(lines) + "\n"


def write_text_atomic(text: str, destination: str | os.PathLike) -> None:
    """Write text so the destination either appears complete or not at all."""
    path = os.fspath(destination)
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(table: Table, destination: str | os.PathLike) -> None:
    write_text_atomic(render_csv(table), destination)
