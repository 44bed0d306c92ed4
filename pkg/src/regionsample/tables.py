"""Plain tabular output: CSV with provenance comments, JSON, atomic writes.

Float cells are serialized with ``repr`` (shortest round-trip form) so that
output files are byte-stable across runs and fully precise; none of the
writers touch wall-clock time.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class Table:
    """Column names plus rows of (str | int | float) cells."""

    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def append(self, *cells) -> None:
        if len(cells) != len(self.columns):
            raise ValueError(
                f"row has {len(cells)} cells for {len(self.columns)} columns"
            )
        self.rows.append(tuple(cells))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def to_csv_text(self, provenance: Sequence[str] = ()) -> str:
        buf = io.StringIO()
        for line in provenance:
            buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_cell(c) for c in row])
        return buf.getvalue()

    def to_json_obj(self) -> dict:
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}


def dump_json(obj, indent: int = 2) -> str:
    """Deterministic JSON text: sorted keys, LF newline at the end."""
    return json.dumps(obj, indent=indent, sort_keys=True) + "\n"


def atomic_write_text(path: str | Path, text: str, force: bool = False) -> None:
    """Write to a temp file in the same directory, then rename into place.

    Refuses to overwrite an existing file unless ``force`` is set.
    """
    path = Path(path)
    if path.exists() and not force:
        raise FileExistsError(
            f"output file {path} already exists; pass force/--force to overwrite"
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
