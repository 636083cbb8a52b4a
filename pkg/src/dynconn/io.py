"""File formats shared by the CLI subcommands.

Everything is plain comma-separated text so fixtures diff cleanly:

* matrix files: header ``time,label:MODALITY,...`` then one row per sample,
  the leading column holding the row time in seconds. Values are written
  with 17 significant digits so floats round-trip exactly.
* label sidecars: one integer per line (ground-truth state labels).
* tables: a header of plain column names, then rows of labels and numbers.
* summaries: sorted ``key = value`` lines with a schema version.

Square matrices that are not sample-by-node (graphs, window similarity) are
written in the same matrix format with the row index as the time column;
for window-indexed columns the modality field is a placeholder (FMRI), as
windows span both modalities.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .timeseries import MODALITIES, TimeSeriesMatrix

SUMMARY_SCHEMA_VERSION = 1

#: Full round-trip precision for float64.
FLOAT_FORMAT = "{:.17g}"


def format_float(x: float) -> str:
    return FLOAT_FORMAT.format(float(x))


def write_matrix_file(
    path,
    values: np.ndarray,
    labels: list[str],
    modalities: list[str],
    dt: float,
    t0: float = 0.0,
) -> None:
    """Write a matrix in the common format, one row per sample."""
    values = np.asarray(values, dtype=float)
    header = ["time"] + [f"{lbl}:{mod}" for lbl, mod in zip(labels, modalities)]
    lines = [",".join(header)]
    for i, row in enumerate(values):
        cells = [format_float(t0 + i * dt)] + [format_float(v) for v in row]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def write_timeseries(path, ts: TimeSeriesMatrix, t0: float = 0.0) -> None:
    write_matrix_file(path, ts.values, ts.labels, ts.modalities, ts.dt, t0)


def read_matrix_file(path) -> TimeSeriesMatrix:
    """Parse a matrix file; the header defines labels and modality tags."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if len(rows) < 3:
        raise ValueError(f"{path}: need a header and at least 2 data rows")
    header = rows[0]
    if header[0].strip() != "time":
        raise ValueError(f"{path}:1: first header field must be 'time', got {header[0]!r}")
    labels, modalities = [], []
    for field in header[1:]:
        name, sep, tag = field.strip().partition(":")
        if not sep or not name or tag not in MODALITIES:
            raise ValueError(
                f"{path}:1: header field {field!r} is not 'label:MODALITY' "
                f"with modality in {MODALITIES}"
            )
        labels.append(name)
        modalities.append(tag)
    if len(set(labels)) != len(labels):
        dupes = sorted({l for l in labels if labels.count(l) > 1})
        raise ValueError(f"{path}:1: duplicate label(s) {dupes}")
    n = len(labels)
    times = np.empty(len(rows) - 1)
    values = np.empty((len(rows) - 1, n))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != n + 1:
            raise ValueError(
                f"{path}:{i}: expected {n + 1} fields, got {len(row)}"
            )
        try:
            parsed = [float(cell) for cell in row]
        except ValueError as err:
            raise ValueError(f"{path}:{i}: non-numeric cell ({err})") from err
        times[i - 2] = parsed[0]
        values[i - 2] = parsed[1:]
    dt = times[1] - times[0]
    if not dt > 0:
        raise ValueError(f"{path}: time column must be strictly increasing")
    expected = times[0] + np.arange(times.size) * dt
    if np.abs(times - expected).max() > 1e-6 * dt:
        raise ValueError(f"{path}: time column is not a uniform grid")
    return TimeSeriesMatrix(values, labels, modalities, float(dt))


def write_labels_file(path, labels) -> None:
    Path(path).write_text("\n".join(str(int(v)) for v in labels) + "\n")


def read_labels_file(path) -> np.ndarray:
    text = Path(path).read_text().split()
    if not text:
        raise ValueError(f"{path}: empty labels file")
    return np.asarray([int(v) for v in text], dtype=int)


def write_table(path, header: list[str], rows: list[list]) -> None:
    """Simple CSV table: strings pass through, numbers get full precision."""
    lines = [",".join(header)]
    for row in rows:
        cells = [c if isinstance(c, str) else format_float(c) for c in row]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def read_table(path) -> tuple[list[str], list[list[str]]]:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: empty table")
    return rows[0], rows[1:]


def numeric_columns(header: list[str], rows: list[list[str]]) -> dict[str, np.ndarray]:
    """Columns of a table that parse as numbers throughout."""
    out = {}
    for j, name in enumerate(header):
        try:
            out[name] = np.asarray([float(r[j]) for r in rows])
        except (ValueError, IndexError):
            continue
    return out


def write_summary(path, entries: dict) -> None:
    """Sorted ``key = value`` lines; floats keep full precision."""
    payload = {"schema_version": SUMMARY_SCHEMA_VERSION, **entries}
    lines = []
    for key in sorted(payload):
        value = payload[key]
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = format_float(value)
        else:
            text = str(value)
        lines.append(f"{key} = {text}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_summary(path) -> dict[str, str]:
    out = {}
    for i, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        key, sep, value = line.partition(" = ")
        if not sep:
            raise ValueError(f"{path}:{i}: not a 'key = value' line: {line!r}")
        out[key.strip()] = value.strip()
    return out
