"""Reader for the simulator's result tables.

The format: ``#``-prefixed ``key: value`` metadata lines, one header row,
then comma-separated data rows of round-trip floats with a trailing string
``status`` cell.  This module never writes — rendering is strictly
read-only.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Dict, List


class PlotDataError(ValueError):
    """Raised for unusable input tables (missing columns, no rows)."""


@dataclasses.dataclass
class Table:
    metadata: Dict[str, str]
    columns: List[str]
    rows: List[List[float]]
    statuses: List[str]

    def column(self, name: str) -> List[float]:
        if name not in self.columns:
            raise PlotDataError(
                f"no column {name!r}; available columns: {', '.join(self.columns)}")
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def has_column(self, name: str) -> bool:
        return name in self.columns


def _parse_cell(cell: str) -> float:
    try:
        return float(cell)
    except ValueError:
        return math.nan


def read_table(path: str) -> Table:
    metadata: Dict[str, str] = {}
    header: List[str] = []
    rows: List[List[float]] = []
    statuses: List[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                metadata[key.strip()] = value.strip()
                continue
            cells = line.split(",")
            if not header:
                header = cells
                continue
            if len(cells) != len(header):
                raise PlotDataError(
                    f"{path}: row has {len(cells)} cells, header has {len(header)}")
            if header[-1] == "status":
                rows.append([_parse_cell(c) for c in cells[:-1]])
                statuses.append(cells[-1])
            else:
                rows.append([_parse_cell(c) for c in cells])
                statuses.append("ok")
    if not header:
        raise PlotDataError(f"{path}: no header row found")
    columns = header[:-1] if header[-1] == "status" else header
    if not rows:
        raise PlotDataError(f"{path}: table holds no data rows")
    return Table(metadata=metadata, columns=columns, rows=rows, statuses=statuses)
