"""Plain-text containers for fields, dictionaries and sweep reports.

Field file (UTF-8, LF line endings)::

    # grid_n=<int>
    # spacing_m=<float>
    # origin_m=<float>,<float>
    # freq_hz=<float>
    0,<re>,<im>
    1,<re>,<im>
    ...                      (n² lines, ascending row-major index)

Dictionary files use the same grid header, replace ``freq_hz`` with
``atom_freqs_hz=<f0>,<f1>,...`` and carry one ``re,im`` pair per atom on
each data line. Values are written with 17 significant digits, so a
save/load round trip is bit-exact.
"""

from __future__ import annotations

import csv
import math
import os
import re
from pathlib import Path

import numpy as np

from ..dictionary import Dictionary
from ..errors import FieldFormatError
from ..grid import Grid2D
from ..synthfield import PressureField

__all__ = [
    "REPORT_COLUMNS",
    "save_field",
    "load_field",
    "save_dictionary",
    "load_dictionary",
    "field_filename",
    "scan_dataset",
    "save_report",
    "load_report",
]

REPORT_COLUMNS = ("band_lo_hz", "band_hi_hz", "freq_hz", "fold", "method", "m",
                  "nmse_db", "ncc", "wall_time_s", "mask_hash")

_HEADER_RE = re.compile(r"^#\s*([a-z_]+)\s*=\s*(.*?)\s*$")
_FIELD_FILE_RE = re.compile(r"^f(\d+(?:\.\d+)?)\.csv$")


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _grid_header(grid: Grid2D) -> list[str]:
    return [f"# grid_n={grid.n}",
            f"# spacing_m={float(grid.spacing_m)!r}",
            f"# origin_m={float(grid.origin_m[0])!r},{float(grid.origin_m[1])!r}"]


def _write_lines(path, lines):
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def save_field(field: PressureField, path) -> None:
    lines = _grid_header(field.grid) + [f"# freq_hz={float(field.freq_hz)!r}"]
    vals = field.values
    lines.extend(f"{i},{_num(v.real)},{_num(v.imag)}" for i, v in enumerate(vals))
    _write_lines(path, lines)


def _read(path) -> tuple[dict, list[list[str]]]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such field file: {path}")
    header, rows = {}, []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                if rows:
                    raise FieldFormatError(f"{path}:{lineno}: header line after data")
                m = _HEADER_RE.match(line)
                if not m:
                    raise FieldFormatError(f"{path}:{lineno}: malformed header line {line!r}")
                header[m.group(1)] = m.group(2)
            else:
                rows.append(line.split(","))
    return header, rows


def _parse_grid(header: dict, path) -> Grid2D:
    try:
        n = int(header["grid_n"])
        spacing = float(header["spacing_m"])
        ox, oy = (float(v) for v in header.get("origin_m", "0,0").split(","))
    except KeyError as exc:
        raise FieldFormatError(f"{path}: missing header {exc.args[0]!r}") from None
    except ValueError as exc:
        raise FieldFormatError(f"{path}: malformed grid header ({exc})") from None
    try:
        return Grid2D(n, spacing, (ox, oy))
    except ValueError as exc:
        raise FieldFormatError(f"{path}: {exc}") from None


def _parse_values(rows, grid: Grid2D, ncols: int, path) -> np.ndarray:
    if len(rows) != grid.size:
        raise FieldFormatError(
            f"{path}: expected {grid.size} data rows for grid_n={grid.n}, found {len(rows)}")
    out = np.empty((grid.size, ncols), dtype=float)
    for i, row in enumerate(rows):
        if len(row) != 1 + ncols:
            raise FieldFormatError(f"{path}: data row {i} has {len(row)} columns, expected {1 + ncols}")
        try:
            idx = int(row[0])
            out[i] = [float(v) for v in row[1:]]
        except ValueError:
            raise FieldFormatError(f"{path}: unparsable data row {i}: {','.join(row)!r}") from None
        if idx != i:
            raise FieldFormatError(f"{path}: data row {i} carries index {idx}; rows must be in index order")
    if not np.all(np.isfinite(out)):
        raise FieldFormatError(f"{path}: non-finite values")
    return out


def load_field(path) -> PressureField:
    header, rows = _read(path)
    grid = _parse_grid(header, path)
    try:
        freq = float(header["freq_hz"])
    except KeyError:
        raise FieldFormatError(f"{path}: missing header 'freq_hz'") from None
    except ValueError:
        raise FieldFormatError(f"{path}: malformed freq_hz {header['freq_hz']!r}") from None
    if not (math.isfinite(freq) and freq > 0):
        raise FieldFormatError(f"{path}: freq_hz must be positive")
    vals = _parse_values(rows, grid, 2, path)
    return PressureField(grid, freq, vals[:, 0] + 1j * vals[:, 1])


def save_dictionary(dictionary: Dictionary, path) -> None:
    freqs = ",".join(repr(float(f)) for f in dictionary.atom_freqs_hz)
    lines = _grid_header(dictionary.grid) + [f"# atom_freqs_hz={freqs}"]
    for i, row in enumerate(dictionary.atoms):
        parts = [str(i)]
        for v in row:
            parts.append(_num(v.real))
            parts.append(_num(v.imag))
        lines.append(",".join(parts))
    _write_lines(path, lines)


def load_dictionary(path) -> Dictionary:
    header, rows = _read(path)
    grid = _parse_grid(header, path)
    try:
        freqs = [float(v) for v in header["atom_freqs_hz"].split(",")]
    except KeyError:
        raise FieldFormatError(f"{path}: missing header 'atom_freqs_hz'") from None
    except ValueError:
        raise FieldFormatError(f"{path}: malformed atom_freqs_hz") from None
    vals = _parse_values(rows, grid, 2 * len(freqs), path)
    atoms = vals[:, 0::2] + 1j * vals[:, 1::2]
    try:
        return Dictionary(grid, tuple(freqs), atoms)
    except ValueError as exc:
        raise FieldFormatError(f"{path}: {exc}") from None


def field_filename(freq_hz: float) -> str:
    """``f<freq>.csv`` with the shortest exact decimal, e.g. ``f600.csv``, ``f557.5.csv``."""
    f = float(freq_hz)
    text = str(int(f)) if f.is_integer() else repr(f)
    return f"f{text}.csv"


def scan_dataset(directory) -> dict[float, Path]:
    """Map frequency -> file for every ``f<freq>.csv`` in ``directory``."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"no such dataset directory: {directory}")
    found = {}
    for entry in sorted(os.listdir(directory)):
        m = _FIELD_FILE_RE.match(entry)
        if m:
            found[float(m.group(1))] = directory / entry
    return found


def _report_value(key, value) -> str:
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        return repr(value)
    return str(value)


def save_report(rows, path) -> None:
    """Write report rows (mappings or objects with the report attributes) as CSV."""
    lines = [",".join(REPORT_COLUMNS)]
    for row in rows:
        get = row.get if isinstance(row, dict) else (lambda k, r=row: getattr(r, k))
        lines.append(",".join(_report_value(k, get(k)) for k in REPORT_COLUMNS))
    _write_lines(path, lines)


def load_report(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != REPORT_COLUMNS:
            raise FieldFormatError(f"{path}: unexpected report header {reader.fieldnames}")
        out = []
        for rec in reader:
            row = dict(rec)
            for key in ("band_lo_hz", "band_hi_hz", "freq_hz", "nmse_db", "ncc", "wall_time_s"):
                row[key] = float(row[key])
            row["fold"] = int(row["fold"])
            row["m"] = int(row["m"])
            out.append(row)
        return out
