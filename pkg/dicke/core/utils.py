"""Utility functions for dicke-thermo."""

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np


def format_value(value) -> str:
    """Render a CSV cell; floats use the shortest round-trip decimal form."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Build CSV text with a mandatory header row."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write rows to a CSV file, creating parent directories as needed."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(columns, rows))
    return path


def parse_csv(text: str) -> tuple[list[str], list[list[str]]]:
    """Split CSV text into (header, rows of strings)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, [])
    return header, [row for row in reader if row]


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    """Read a CSV file back as (header, rows of strings)."""
    return parse_csv(Path(path).read_text())


def key_value_block(values: dict) -> str:
    """Format a mapping as `key=value` lines."""
    return "\n".join(f"{key}={format_value(value)}" for key, value in values.items())


def parse_key_value(text: str, source: Optional[str] = None) -> dict[str, str]:
    """Parse `key=value` lines; blank lines and `#` comments are skipped."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            where = f"{source}:{lineno}" if source else f"line {lineno}"
            raise ValueError(f"{where}: expected key=value, got '{raw.strip()}'")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def format_table(columns: list[str], rows: list[dict]) -> str:
    """Format data as an ASCII table.

    Args:
        columns: List of column names
        rows: List of row dictionaries

    Returns:
        Formatted ASCII table string
    """
    if not columns:
        return ""

    str_rows = [{col: format_value(row.get(col, "")) for col in columns} for row in rows]
    widths = {
        col: max([len(col)] + [len(row[col]) for row in str_rows]) for col in columns
    }

    separator = "+" + "+".join("-" * (widths[col] + 2) for col in columns) + "+"
    header = "|" + "|".join(f" {col.ljust(widths[col])} " for col in columns) + "|"
    lines = [separator, header, separator]
    for row in str_rows:
        lines.append("|" + "|".join(f" {row[col].rjust(widths[col])} " for col in columns) + "|")
    lines.append(separator)
    return "\n".join(lines)
