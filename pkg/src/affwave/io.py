"""File formats: signal and spectrum CSV, WAV ingestion, matrix CSVs and JSON sidecars.

Every number is written with Python's shortest round-trip ``repr``.
"""

from __future__ import annotations

import csv
import json
import math
import wave
from pathlib import Path
from typing import Optional

import numpy as np

from .core import GeoGrid, RealGrid, SaftMatrix, Scalogram, Signal, Wavelet, as_grid
from .errors import GridMismatch, NonuniformGrid, ParseError

SPACING_TOL = 1e-9


def fmt(x: float) -> str:
    """Shortest round-trip decimal for a real number."""
    x = float(x)
    if x == 0.0:
        return "0.0"
    return repr(x)


def fmt_complex_cell(z: complex) -> str:
    return f"{fmt(z.real)}:{fmt(z.imag)}"


def _parse_float(text: str, line: int, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"line {line}: cannot parse {what} {text!r}") from None


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.complexfloating):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def dump_json(obj, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: line {e.lineno}: {e.msg}") from None


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def grid_from_dict(d: dict):
    kind = d.get("type")
    if kind == "uniform":
        return RealGrid(d["start"], d["step"], d["count"])
    if kind == "geometric":
        return GeoGrid(d["start"], d["ratio"], d["count"])
    raise ParseError(f"unknown grid type {kind!r}")


# ---------------------------------------------------------------------------
# one-dimensional series

def _uniform_axis(t: np.ndarray, lines: list) -> tuple:
    if t.size == 1:
        return float(t[0]), 1.0
    d = np.diff(t)
    step = (t[-1] - t[0]) / (t.size - 1)
    if not (step > 0 and d[0] > 0):
        raise NonuniformGrid("sample positions must be strictly increasing")
    bad = np.nonzero(np.abs(d - d[0]) > SPACING_TOL * abs(d[0]))[0]
    if bad.size:
        i = int(bad[0])
        raise NonuniformGrid(f"line {lines[i + 1]}: spacing {float(d[i])!r} differs from {float(d[0])!r}")
    return float(t[0]), float(step)


def read_series(path, axis: str = "t") -> tuple:
    """Rows ``x,re,im`` with an optional header; returns (x0, dx, values)."""
    xs, vals, lines = [], [], []
    first = None
    with open(path, newline="") as fh:
        for n, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if first is None and row[0].strip().lower() in (axis, "t", "omega", "x"):
                continue
            if len(row) not in (2, 3):
                raise ParseError(f"line {n}: expected {axis},re,im, got {len(row)} fields")
            if first is None:
                first = n
            x = _parse_float(row[0], n, axis)
            re = _parse_float(row[1], n, "re")
            im = _parse_float(row[2], n, "im") if len(row) == 3 else 0.0
            xs.append(x)
            vals.append(complex(re, im))
            lines.append(n)
    if not xs:
        raise ParseError(f"{path}: no samples")
    x0, dx = _uniform_axis(np.array(xs), lines)
    return x0, dx, np.array(vals)


def write_series(path, x0: float, dx: float, values, axis: str = "t") -> Path:
    path = Path(path)
    lines = [f"{axis},re,im"]
    for i, v in enumerate(np.asarray(values, dtype=complex)):
        lines.append(f"{fmt(x0 + i * dx)},{fmt(v.real)},{fmt(v.imag)}")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_signal_csv(path) -> Signal:
    t0, dt, vals = read_series(path, "t")
    return Signal(vals, t0, dt)


def write_signal_csv(path, f: Signal) -> Path:
    return write_series(path, f.t0, f.dt, f.samples, "t")


def read_wav(path) -> Signal:
    """PCM 16- or 32-bit mono WAV, amplitude normalized to [-1, 1]."""
    try:
        with wave.open(str(path), "rb") as w:
            channels, width, rate, frames = w.getnchannels(), w.getsampwidth(), w.getframerate(), w.getnframes()
            raw = w.readframes(frames)
    except (wave.Error, EOFError) as e:
        raise ParseError(f"{path}: byte 0: not a readable PCM WAV file ({e})") from None
    if channels != 1:
        raise ParseError(f"{path}: byte 22: expected mono, found {channels} channels")
    if width == 2:
        x = np.frombuffer(raw, dtype="<i2").astype(float) / 32768.0
    elif width == 4:
        x = np.frombuffer(raw, dtype="<i4").astype(float) / 2147483648.0
    else:
        raise ParseError(f"{path}: byte 34: unsupported sample width {8 * width} bits")
    if x.size == 0:
        raise ParseError(f"{path}: no samples")
    return Signal(x.astype(complex), 0.0, 1.0 / rate)


def write_wav(path, samples, rate: int, bits: int = 16) -> Path:
    """Write the real part of ``samples`` (clipped to [-1, 1]) as PCM mono."""
    x = np.clip(np.real(np.asarray(samples)), -1.0, 1.0)
    if bits == 16:
        data = np.round(x * 32767).astype("<i2").tobytes()
    elif bits == 32:
        data = np.round(x * 2147483647).astype("<i4").tobytes()
    else:
        raise ValueError("bits must be 16 or 32")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(bits // 8)
        w.setframerate(int(rate))
        w.writeframes(data)
    return Path(path)


def ingest_signal(path, fmt_name: Optional[str] = None) -> Signal:
    """Read a CSV or WAV signal; the format defaults to the file suffix."""
    kind = (fmt_name or Path(path).suffix.lstrip(".")).lower()
    if not Path(path).is_file():
        raise ParseError(f"{path}: no such file")
    if kind == "wav":
        return read_wav(path)
    if kind in ("csv", "txt", ""):
        return read_signal_csv(path)
    raise ParseError(f"{path}: unknown signal format {kind!r}")


# ---------------------------------------------------------------------------
# matrices: rows are the second axis, columns the first

def write_matrix_csv(path, values, col_values, row_values, row_label: str, col_label: str) -> Path:
    """values[col, row] written with header ``row_label\\col_label,c1,c2,...``."""
    v = np.asarray(values, dtype=complex)
    path = Path(path)
    lines = [",".join([f"{row_label}\\{col_label}"] + [fmt(c) for c in col_values])]
    for j, r in enumerate(row_values):
        lines.append(",".join([fmt(r)] + [fmt_complex_cell(z) for z in v[:, j]]))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_matrix_csv(path) -> dict:
    """Parse the matrix format; returns labels, axis values and values[col, row]."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise ParseError(f"{path}: line 1: empty file")
    head = rows[0]
    if "\\" not in head[0]:
        raise ParseError(f"{path}: line 1: header must start with 'row\\col'")
    row_label, col_label = head[0].split("\\", 1)
    cols = np.array([_parse_float(x, 1, col_label) for x in head[1:]])
    rvals, data = [], []
    for n, r in enumerate(rows[1:], start=2):
        if len(r) != cols.size + 1:
            raise ParseError(f"{path}: line {n}: expected {cols.size + 1} fields, got {len(r)}")
        rvals.append(_parse_float(r[0], n, row_label))
        cells = []
        for cell in r[1:]:
            parts = cell.split(":")
            if len(parts) != 2:
                raise ParseError(f"{path}: line {n}: cell {cell!r} is not re:im")
            cells.append(complex(_parse_float(parts[0], n, "re"), _parse_float(parts[1], n, "im")))
        data.append(cells)
    values = np.array(data, dtype=complex).reshape(len(rvals), cols.size).T
    return {"row_label": row_label, "col_label": col_label, "cols": cols,
            "rows": np.array(rvals), "values": values}


def write_scalogram(path, W: Scalogram, constants: Optional[dict] = None, extra: Optional[dict] = None) -> tuple:
    """Scalogram CSV (rows b, columns a) plus the JSON sidecar."""
    csv_path = write_matrix_csv(path, W.values, W.a_grid.values, W.b_grid.values, "b", "a")
    side = {"kind": "scalogram", "matrix": list(W.matrix.as_tuple()), "a_grid": W.a_grid.describe(),
            "b_grid": W.b_grid.describe(), "wavelet": W.meta.get("wavelet"),
            "signal_grid": W.meta.get("signal_grid"), "constants": constants or {}}
    if extra:
        side.update(extra)
    return csv_path, dump_json(side, sidecar_path(path))


def read_scalogram(path, matrix: Optional[SaftMatrix] = None) -> Scalogram:
    """Read a scalogram CSV; grids and matrix come from the sidecar when present."""
    data = read_matrix_csv(path)
    side_file = sidecar_path(path)
    side = load_json(side_file) if side_file.is_file() else {}
    try:
        a_grid = grid_from_dict(side["a_grid"]) if "a_grid" in side else as_grid(data["cols"])
        b_grid = grid_from_dict(side["b_grid"]) if "b_grid" in side else as_grid(data["rows"])
    except GridMismatch as e:
        raise NonuniformGrid(f"{path}: {e}") from None
    if matrix is None:
        if "matrix" not in side:
            raise ParseError(f"{path}: no matrix given and no sidecar with one")
        matrix = SaftMatrix(*side["matrix"])
    meta = {k: side[k] for k in ("wavelet", "signal_grid", "constants") if k in side}
    return Scalogram(data["values"], a_grid, b_grid, matrix, meta)


def wavelet_from_dict(d: dict) -> Wavelet:
    g = d.get("gain", [1.0, 0.0])
    return Wavelet(d["kind"], alpha=d.get("alpha", 0.0), gain=complex(g[0], g[1]))


# ---------------------------------------------------------------------------
# coefficient tables

def write_coefficients(path, table) -> Path:
    spec = table.spec
    lines = ["j,k,re,im"]
    for ji, j in enumerate(spec.js):
        for ki, k in enumerate(spec.ks):
            z = table.values[ji, ki]
            lines.append(f"{int(j)},{int(k)},{fmt(z.real)},{fmt(z.imag)}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_coefficients(path) -> dict:
    """Map (j, k) -> complex from a ``j,k,re,im`` table."""
    out = {}
    with open(path, newline="") as fh:
        for n, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].strip() == "j":
                continue
            if len(row) != 4:
                raise ParseError(f"{path}: line {n}: expected j,k,re,im")
            try:
                j, k = int(row[0]), int(row[1])
            except ValueError:
                raise ParseError(f"{path}: line {n}: indices must be integers") from None
            out[(j, k)] = complex(_parse_float(row[2], n, "re"), _parse_float(row[3], n, "im"))
    if not out:
        raise ParseError(f"{path}: no coefficients")
    return out
