"""Binary restart snapshots and CSV diagnostic records.

Snapshot layout (little-endian)::

    b"GSGF"  version:u32  dim:u32  n:u32
    t:f64  alpha1:f64  mu0:f64  mu1:f64  r:f64
    u: f64[dim, n, ..., n]   physical samples, row-major
"""

from __future__ import annotations

import csv
import math
import struct
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from ..diagnostics import CSV_FIELDS, EnergyRecord
from ..grid import Grid, make_grid
from ..stepper import SimState

MAGIC = b"GSGF"
VERSION = 1
_HEADER = struct.Struct("<4sIII5d")


class SnapshotError(ValueError):
    pass


class SnapshotHeader(NamedTuple):
    dim: int
    n: int
    t: float
    alpha1: float
    mu0: float
    mu1: float
    r: float


def write_snapshot(state: SimState, path: str | Path, *, alpha1: float, mu0: float, mu1: float,
                   r: float) -> None:
    u = np.ascontiguousarray(state.u, dtype="<f8")
    dim, n = u.shape[0], u.shape[1]
    header = _HEADER.pack(MAGIC, VERSION, dim, n, state.t, alpha1, mu0, mu1, r)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(u.tobytes(order="C"))


def read_header(path: str | Path) -> SnapshotHeader:
    with open(path, "rb") as fh:
        return _unpack_header(fh.read(_HEADER.size), path)


def _unpack_header(raw: bytes, path) -> SnapshotHeader:
    if len(raw) < _HEADER.size:
        raise SnapshotError(f"{path}: truncated snapshot header")
    magic, version, dim, n, *floats = _HEADER.unpack(raw[: _HEADER.size])
    if magic != MAGIC:
        raise SnapshotError(f"{path}: not a snapshot (magic {magic!r})")
    if version != VERSION:
        raise SnapshotError(f"{path}: unsupported snapshot version {version}")
    return SnapshotHeader(dim, n, *floats)


def read_snapshot(path: str | Path, grid: Grid | None = None) -> SimState:
    """Load a state; with ``grid`` given, its ``dim`` and ``n`` must match the file."""
    raw = Path(path).read_bytes()
    head = _unpack_header(raw, path)
    if grid is None:
        grid = make_grid(head.dim, head.n)
    elif (grid.dim, grid.n) != (head.dim, head.n):
        raise SnapshotError(
            f"{path}: snapshot is dim={head.dim}, n={head.n}; expected dim={grid.dim}, n={grid.n}"
        )
    shape = (head.dim,) + (head.n,) * head.dim
    body = raw[_HEADER.size:]
    expected = 8 * math.prod(shape)
    if len(body) != expected:
        raise SnapshotError(f"{path}: payload is {len(body)} bytes, expected {expected}")
    u = np.frombuffer(body, dtype="<f8").reshape(shape).astype(float)
    return SimState.from_physical(head.t, u, grid)


def _row(record: EnergyRecord) -> list[str]:
    return [repr(float(x)) for x in record.values()]


def write_records(series: Iterable[EnergyRecord], path: str | Path, append: bool = False) -> None:
    """CSV with a header row; floats use the shortest round-trip representation."""
    path = Path(path)
    fresh = not append or not path.exists() or path.stat().st_size == 0
    with open(path, "w" if fresh else "a", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if fresh:
            writer.writerow(CSV_FIELDS)
        writer.writerows(_row(rec) for rec in series)


def read_records(path: str | Path) -> list[EnergyRecord]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != CSV_FIELDS:
            raise ValueError(f"{path}: unexpected records header {header}")
        return [EnergyRecord(*(float(x) for x in row)) for row in reader]


def truncate_records(path: str | Path, t_max: float) -> None:
    """Drop rows with ``t > t_max``, keeping the header and earlier rows byte-for-byte."""
    path = Path(path)
    if not path.exists():
        return
    lines = path.read_text().splitlines(keepends=True)
    kept = lines[:1] + [ln for ln in lines[1:] if float(ln.split(",", 1)[0]) <= t_max]
    path.write_text("".join(kept))
