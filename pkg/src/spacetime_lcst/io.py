"""STCF binary files and CSV export.

Layout (little-endian): magic ``b"STCF"``, u32 version, u8 kind
(0 space-time, 1 frequency), 3 zero bytes, four u32 sample counts, four f64
spacings, four f64 origins, then one record of 16 f64 coefficients per sample
in row-major ``(t, x1, x2, x3)`` order.
"""
from __future__ import annotations

import csv
import os
import struct
from typing import Mapping

import numpy as np

from . import algebra as ga
from .grid import Field, FrequencyGrid, SpaceTimeGrid, SpaceTimeSignal, Spectrum

MAGIC = b"STCF"
VERSION = 1
HEADER = struct.Struct("<4sIB3x4I4d4d")
AXIS_NAMES = ("t", "x1", "x2", "x3")
FREQ_AXIS_NAMES = ("w_t", "w1", "w2", "w3")


class FormatError(ValueError):
    """Malformed or truncated STCF/CSV input."""


def encode(field: Field) -> bytes:
    g = field.grid
    kind = 1 if isinstance(field, Spectrum) else 0
    head = HEADER.pack(MAGIC, VERSION, kind, *g.n, *g.spacing, *g.origin)
    return head + np.ascontiguousarray(field.data, dtype="<f8").tobytes()


def decode(buf: bytes) -> Field:
    if len(buf) < 4:
        raise FormatError(f"truncated header at byte offset {len(buf)}: need {HEADER.size} bytes")
    if buf[:4] != MAGIC:
        raise FormatError(f"bad magic {buf[:4]!r} at byte offset 0, expected {MAGIC!r}")
    if len(buf) < HEADER.size:
        raise FormatError(f"truncated header at byte offset {len(buf)}: need {HEADER.size} bytes")
    fields = HEADER.unpack_from(buf)
    version, kind = fields[1], fields[2]
    if version != VERSION:
        raise FormatError(f"unsupported version {version} at byte offset 4")
    if kind not in (0, 1):
        raise FormatError(f"unknown kind byte {kind} at byte offset 8")
    if buf[9:12] != b"\0\0\0":
        raise FormatError("reserved bytes at offset 9 are not zero")
    n, spacing, origin = fields[3:7], fields[7:11], fields[11:15]
    count = int(np.prod(n)) * 16
    need = HEADER.size + 8 * count
    if len(buf) < need:
        raise FormatError(f"truncated payload at byte offset {len(buf)}: expected {need} bytes")
    if len(buf) > need:
        raise FormatError(f"trailing data after byte offset {need}")
    data = np.frombuffer(buf, dtype="<f8", count=count, offset=HEADER.size)
    data = data.astype(float).reshape(tuple(n) + (16,))
    if kind == 0:
        return SpaceTimeSignal(SpaceTimeGrid(n, spacing, origin), data)
    return Spectrum(FrequencyGrid(n, spacing, origin), data)


def write_signal(field: Field, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(encode(field))


def read_signal(path: str | os.PathLike) -> Field:
    with open(path, "rb") as fh:
        return decode(fh.read())


def parse_slice(text: str | None) -> dict[int, int]:
    """``"t=0,x3=4"`` -> ``{0: 0, 3: 4}``; axes may also be given as 0..3."""
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        name, _, idx = item.partition("=")
        name = name.strip()
        if name in AXIS_NAMES:
            axis = AXIS_NAMES.index(name)
        elif name in FREQ_AXIS_NAMES:
            axis = FREQ_AXIS_NAMES.index(name)
        elif name.isdigit() and int(name) < 4:
            axis = int(name)
        else:
            raise ValueError(f"unknown axis {name!r} in slice")
        try:
            out[axis] = int(idx)
        except ValueError:
            raise ValueError(f"slice index for {name!r} must be an integer") from None
    return out


def export_csv(field: Field, path: str | os.PathLike, fix: Mapping[int, int] | None = None) -> int:
    """Write one row per sample (4 coordinates + 16 blades); returns the row count.

    ``fix`` pins axes to single indices. Values use 17 significant digits so
    re-reading reproduces every double exactly.
    """
    g = field.grid
    fix = dict(fix or {})
    index = []
    for k in range(4):
        if k in fix:
            j = fix[k]
            if not 0 <= j < g.n[k]:
                raise IndexError(f"slice index {j} out of range for axis {k} (size {g.n[k]})")
            index.append(np.array([j]))
        else:
            index.append(np.arange(g.n[k]))
    names = FREQ_AXIS_NAMES if isinstance(field, Spectrum) else AXIS_NAMES
    sub = field.data[np.ix_(*index)].reshape(-1, 16)
    coords = np.stack(
        [c.ravel() for c in np.meshgrid(*[g.origin[k] + index[k] * g.spacing[k] for k in range(4)], indexing="ij")],
        axis=1,
    )
    rows = np.concatenate([coords, sub], axis=1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(names) + list(ga.BLADE_NAMES))
        for row in rows:
            w.writerow([format(v, ".17g") for v in row])
    return len(rows)


def read_csv(path: str | os.PathLike) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`export_csv`: ``(coords (M, 4), coefficients (M, 16))``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) != 20:
            raise FormatError("CSV header must have 20 columns")
        rows = np.array([[float(v) for v in r] for r in reader], dtype=float).reshape(-1, 20)
    return rows[:, :4], rows[:, 4:]
