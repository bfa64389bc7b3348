"""CSV output with '#' metadata headers.

Every file this package writes is self-describing: the header carries the
fully resolved parameters that produced the data, one ``# key = value`` line
each.  Floats are written with repr so identical runs produce identical
bytes.
"""

from __future__ import annotations

import os
from typing import Mapping, Sequence

import numpy as np


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(
    path: str | os.PathLike,
    columns: Mapping[str, Sequence],
    metadata: Mapping[str, object],
) -> None:
    names = list(columns)
    arrays = [np.asarray(columns[name]) for name in names]
    n_rows = len(arrays[0])
    if any(len(a) != n_rows for a in arrays):
        raise ValueError("all columns must have the same length")
    lines = [f"# {key} = {format_value(value)}" for key, value in metadata.items()]
    lines.append(",".join(names))
    for i in range(n_rows):
        lines.append(",".join(format_value(a[i]) for a in arrays))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path: str | os.PathLike) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    """Parse a file written by write_csv back into columns and metadata."""
    metadata: dict[str, str] = {}
    rows: list[list[str]] = []
    names: list[str] | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    metadata[key.strip()] = value.strip()
                continue
            if names is None:
                names = line.split(",")
            else:
                rows.append(line.split(","))
    if names is None:
        raise ValueError(f"{path}: no column header found")
    data = {}
    for j, name in enumerate(names):
        col = [r[j] for r in rows]
        try:
            data[name] = np.array([float(x) for x in col])
        except ValueError:
            data[name] = np.array(col)
    return data, metadata
