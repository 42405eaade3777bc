import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence, TextIO

from .general import format_float, format_fraction


def render_value(value: Any) -> Any:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, (list, tuple)):
        return " ".join(str(render_value(v)) for v in value)
    return value if isinstance(value, int) else str(value)


@dataclass
class Table:
    """Named columns of exact values, rendered as tsv, csv or json."""

    columns: Sequence[str]
    rows: list = field(default_factory=list)
    title: str = ""

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values for {len(self.columns)} columns")
        self.rows.append(tuple(values))

    def extend(self, rows: Iterable[Sequence]) -> None:
        for row in rows:
            self.add(*row)

    def column(self, name: str) -> list:
        i = list(self.columns).index(name)
        return [row[i] for row in self.rows]

    def with_floats(self) -> "Table":
        """Append a decimal column after every column holding rationals."""
        exact = [
            i
            for i, _ in enumerate(self.columns)
            if any(isinstance(row[i], Fraction) for row in self.rows)
        ]
        if not exact:
            return self
        columns = []
        for i, name in enumerate(self.columns):
            columns.append(name)
            if i in exact:
                columns.append(f"{name}_float")
        table = Table(columns, title=self.title)
        for row in self.rows:
            values = []
            for i, v in enumerate(row):
                values.append(v)
                if i in exact:
                    values.append(float(v) if isinstance(v, (int, Fraction)) else v)
            table.add(*values)
        return table


def write_table(table: Table, fmt: str, stream: TextIO, floats: bool = False) -> None:
    if floats:
        table = table.with_floats()
    if fmt == "json":
        data = {
            "columns": list(table.columns),
            "rows": [[render_value(v) for v in row] for row in table.rows],
        }
        if table.title:
            data["title"] = table.title
        stream.write(json.dumps(data, indent=2) + "\n")
        return
    if fmt not in ("tsv", "csv"):
        raise ValueError(f"unknown output format '{fmt}'")
    if fmt == "tsv":
        writer = csv.writer(
            stream, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_NONE, escapechar="\\"
        )
    else:
        writer = csv.writer(stream, lineterminator="\n")
    if table.title and fmt == "tsv":
        stream.write(f"# {table.title}\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([render_value(v) for v in row])


def write_tables(tables: Sequence[Table], fmt: str, stream: TextIO, floats: bool = False) -> None:
    for i, table in enumerate(tables):
        if i and fmt != "json":
            stream.write("\n")
        write_table(table, fmt, stream, floats)
