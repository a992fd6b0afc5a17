"""Snapshot and time-series export.

Binary snapshot layout (all little-endian)::

    offset  type      field
    0       4 bytes   magic  b"ZMDW"
    4       uint32    version (1)
    8       uint32    n, points per axis
    12      float64   box, edge length
    20      uint32    m, number of field components
    24      uint32    flags, bit 0 set when components are complex
    28      float64[] data, component-major; each component is n^3 values in
                      C order over (x, y, z); a complex component is written
                      as its real block followed by its imaginary block
"""
from __future__ import annotations

import csv
import json
import struct
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .solver import FieldState, GridSpec, SpinorField

__all__ = [
    "MAGIC",
    "FORMAT_VERSION",
    "HEADER",
    "SnapshotHeader",
    "write_snapshot_binary",
    "read_snapshot_binary",
    "write_snapshot_csv",
    "write_series_csv",
    "write_json",
    "write_plot_script",
]

MAGIC = b"ZMDW"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sIIdII")
_COMPLEX = 1


class SnapshotHeader(NamedTuple):
    version: int
    n: int
    box: float
    m: int
    is_complex: bool


def _as_components(field) -> tuple[GridSpec, np.ndarray, list[str]]:
    if isinstance(field, SpinorField):
        return field.grid, field.values, [f"psi{i}" for i in range(field.m)]
    if isinstance(field, FieldState):
        return field.grid, field.stack(), ["E1", "E2", "E3", "B1", "B2", "B3", "E0", "B0"]
    raise TypeError(f"expected SpinorField or FieldState, got {type(field).__name__}")


def write_snapshot_binary(path, field) -> Path:
    grid, values, _ = _as_components(field)
    is_complex = np.iscomplexobj(values)
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(HEADER.pack(MAGIC, FORMAT_VERSION, grid.n, float(grid.box), values.shape[0],
                             _COMPLEX if is_complex else 0))
        for comp in values:
            blocks = (comp.real, comp.imag) if is_complex else (comp,)
            for blk in blocks:
                fh.write(np.ascontiguousarray(blk, dtype="<f8").tobytes())
    return path


def read_snapshot_binary(path) -> tuple[SnapshotHeader, np.ndarray]:
    """Return the header and an array of shape ``(m, n, n, n)`` (complex when flagged)."""
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise ValueError("file shorter than the snapshot header")
    magic, version, n, box, m, flags = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    is_complex = bool(flags & _COMPLEX)
    blocks = m * (2 if is_complex else 1)
    expected = HEADER.size + blocks * n ** 3 * 8
    if len(raw) != expected:
        raise ValueError(f"payload size {len(raw)} does not match header (expected {expected})")
    data = np.frombuffer(raw, dtype="<f8", offset=HEADER.size).reshape((blocks, n, n, n))
    if is_complex:
        data = data[0::2] + 1j * data[1::2]
    return SnapshotHeader(version, n, box, m, is_complex), data.astype(complex if is_complex else float)


def write_snapshot_csv(path, field) -> Path:
    """One row per grid point: ``x, y, z`` then every component (``re_``/``im_`` pairs when complex)."""
    grid, values, names = _as_components(field)
    x, y, z = (c.ravel() for c in grid.coordinates())
    cols = [x, y, z]
    header = ["x", "y", "z"]
    for name, comp in zip(names, values):
        if np.iscomplexobj(comp):
            cols += [comp.real.ravel(), comp.imag.ravel()]
            header += [f"re_{name}", f"im_{name}"]
        else:
            cols.append(comp.ravel())
            header.append(name)
    path = Path(path)
    np.savetxt(path, np.column_stack(cols), delimiter=",", header=",".join(header), comments="", fmt="%.17g")
    return path


def write_series_csv(path, columns: Sequence[str], table: np.ndarray) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in np.asarray(table):
            w.writerow(["" if np.isnan(v) else repr(float(v)) for v in row])
    return path


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, default=_jsonable) + "\n")
    return path


_PLOT_TEMPLATE = '''\
"""Plot the time series in {csv_name} on a log scale."""
import csv
import sys

import matplotlib.pyplot as plt

with open({csv_name!r}, newline="") as fh:
    rows = list(csv.reader(fh))
header, body = rows[0], rows[1:]
t = [float(r[0]) for r in body]
fig, ax = plt.subplots(figsize=(8, 5))
for j, name in enumerate(header[1:], 1):
    pts = [(ti, abs(float(r[j]))) for ti, r in zip(t, body) if r[j] != ""]
    pts = [(ti, v) for ti, v in pts if v > 0]
    if pts:
        ax.semilogy(*zip(*pts), label=name)
ax.set_xlabel("t")
ax.set_title({title!r})
ax.legend(fontsize="x-small")
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else {png_name!r}, dpi=120)
'''


def write_plot_script(path, csv_name: str, title: str) -> Path:
    """Emit a standalone matplotlib script for a series CSV in the same directory."""
    path = Path(path)
    png = Path(csv_name).with_suffix(".png").name
    path.write_text(_PLOT_TEMPLATE.format(csv_name=csv_name, title=title, png_name=png))
    return path
