"""Tabular results and their CSV / JSON serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from . import __version__

ERROR_COLUMN = "error"


def fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, int)) and not isinstance(value, float):
        return str(int(value))
    return format(float(value), ".17g")


@dataclass
class ResultTable:
    name: str
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    provenance: dict[str, str] = field(default_factory=dict)

    def append(self, row) -> None:
        row = tuple(row)
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} values, table {self.name!r} has {len(self.columns)} columns")
        self.rows.append(row)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    @property
    def failed_rows(self) -> int:
        if ERROR_COLUMN not in self.columns:
            return 0
        return sum(1 for e in self.column(ERROR_COLUMN) if e)

    def header(self) -> dict[str, str]:
        return {"tool": f"epsense {__version__}", "table": self.name, **self.provenance}

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.header().items():
            buf.write(f"# {k}: {v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([fmt(v) for v in r])
        return buf.getvalue()

    def to_json(self) -> str:
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return None
            return v

        body = {"provenance": self.header(), "columns": self.columns,
                "rows": [[clean(v) for v in r] for r in self.rows]}
        return json.dumps(body, indent=1)

    def render(self, fmt_name: str = "csv") -> str:
        return self.to_json() if fmt_name == "json" else self.to_csv()


def read_csv(text: str) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """Inverse of :meth:`ResultTable.to_csv` (values stay strings)."""
    prov, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            k, _, v = line[2:].partition(": ")
            prov[k] = v
        else:
            body.append(line)
    rows = list(csv.reader(body))
    return prov, rows[0], rows[1:]
