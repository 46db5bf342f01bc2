"""Readers and writers for transform outputs (AWTF binary, CSV, PGM)."""
import math
import struct

import numpy as np

from .errors import ValidationError
from .transform import ComplexField, TimeScaleGrid

MAGIC = b"AWTF"
VERSION = 1
_HEADER = struct.Struct("<4sIQQdd")


def write_awtf(path, W):
    g = W.grid
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, g.scales.size, g.n_t, g.t0, g.dt))
        fh.write(np.asarray(g.scales, dtype="<f8").tobytes())
        inter = np.empty(W.values.shape + (2,), dtype="<f8")
        inter[..., 0] = W.values.real
        inter[..., 1] = W.values.imag
        fh.write(inter.tobytes())


def read_awtf(path):
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise ValidationError(f"{path}: truncated header")
        magic, version, n_s, n_t, t0, dt = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValidationError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise ValidationError(f"{path}: unsupported version {version}")
        scales = np.frombuffer(fh.read(8 * n_s), dtype="<f8")
        body = np.frombuffer(fh.read(), dtype="<f8")
    if scales.size != n_s or body.size != 2 * n_s * n_t:
        raise ValidationError(f"{path}: payload size does not match header")
    vals = body.reshape(n_s, n_t, 2)
    grid = TimeScaleGrid(t0, dt, n_t, scales.copy())
    return ComplexField(grid, vals[..., 0] + 1j * vals[..., 1])


def write_field_csv(path, W, header_lines=(), run_id=None):
    g = W.grid
    tail = "" if run_id is None else f",{run_id}"
    t = g.times
    mag = np.abs(W.values)
    ph = np.mod(np.angle(W.values), 2 * math.pi)
    with open(path, "w") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("t,s,re,im,mag,phase" + ("" if run_id is None else ",run_id") + "\n")
        for i, s in enumerate(g.scales):
            row = W.values[i]
            for j in range(g.n_t):
                fh.write(f"{t[j]:.17g},{s:.17g},{row[j].real:.17g},{row[j].imag:.17g},"
                         f"{mag[i, j]:.17g},{ph[i, j]:.17g}{tail}\n")


def write_pgm(path, magnitude, db=False, floor_db=-60.0):
    """8-bit grayscale quick-look, one row per scale (smallest scale on top)."""
    m = np.asarray(magnitude, dtype=float)
    if db:
        peak = m.max()
        with np.errstate(divide="ignore"):
            v = 20 * np.log10(m / peak) if peak > 0 else np.full(m.shape, floor_db)
        v = np.clip((v - floor_db) / -floor_db, 0, 1)
    else:
        peak = m.max()
        v = m / peak if peak > 0 else np.zeros_like(m)
    img = np.round(v * 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode())
        fh.write(img.tobytes())
