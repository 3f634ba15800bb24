"""Reader for the cavitysr CSV contract.

The only coupling to the solver package is the file format itself: a
``# cavitysr-csv v1 kind=... solver=...`` banner line, a header row, and
rows of 17-significant-digit numbers where empty fields mean "not
defined".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SCHEMA = "cavitysr-csv v1"


class SchemaError(ValueError):
    """Input file does not carry the expected CSV schema."""


@dataclass
class Table:
    path: str
    schema: str
    kind: str
    solver: str
    columns: dict      # name -> float ndarray (NaN for empty fields)
    text_columns: dict  # name -> list of raw strings

    def __getitem__(self, name):
        if name in self.columns:
            return self.columns[name]
        raise KeyError(f"{self.path}: no column {name!r}; "
                       f"have {sorted(self.columns)}")


def read_table(path) -> Table:
    with open(path, "r", encoding="utf-8") as fh:
        banner = fh.readline().strip()
        if not banner.startswith("#"):
            raise SchemaError(f"{path}: missing schema banner line")
        fields = banner.lstrip("# ").split()
        schema = " ".join(fields[:2])
        if schema != SCHEMA:
            raise SchemaError(f"{path}: schema {schema!r}, expected {SCHEMA!r}")
        meta = dict(item.split("=", 1) for item in fields[2:] if "=" in item)
        header = fh.readline().strip().split(",")
        raw = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    if any(len(row) != len(header) for row in raw):
        raise SchemaError(f"{path}: ragged rows")
    columns = {}
    text_columns = {}
    for j, name in enumerate(header):
        cells = [row[j] for row in raw]
        values = np.full(len(cells), np.nan)
        numeric = True
        for i, cell in enumerate(cells):
            if cell == "":
                continue
            try:
                values[i] = float(cell)
            except ValueError:
                numeric = False
                break
        if numeric:
            columns[name] = values
        else:
            text_columns[name] = cells
    return Table(path=str(path), schema=schema, kind=meta.get("kind", ""),
                 solver=meta.get("solver", ""), columns=columns,
                 text_columns=text_columns)


def check_same_schema(tables):
    schemas = {t.schema for t in tables}
    if len(schemas) > 1:
        raise SchemaError(f"mixed schema versions: {sorted(schemas)}")
