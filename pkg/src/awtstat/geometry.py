"""Ridge extraction and level sets of scalograms.

Level sets use marching squares on the (scale, time) sample grid with
linear interpolation along cell edges; ambiguous saddle cells are split
by the cell-average value. Segments are chained into polylines here, the
cell sweep itself is a compiled kernel.
"""
from dataclasses import dataclass, field
import csv

import numpy as np

from ._backend import kernels
from .errors import DomainError
from .transform import ComplexField

# a contour vertex is near-critical when the gradient of |W|^2 there is
# below this fraction of the largest gradient on the grid
NEAR_CRITICAL_REL = 1e-3


@dataclass(eq=False)
class RidgeCurve:
    times: np.ndarray
    s_f: np.ndarray
    index: np.ndarray
    is_boundary: np.ndarray
    zero_column: np.ndarray

    def write_csv(self, path, header_lines=()):
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(["t", "s_f", "boundary_flag"])
            for t, s, b in zip(self.times, self.s_f, self.is_boundary):
                w.writerow([f"{t:.17g}", f"{s:.17g}", int(b)])


@dataclass(eq=False)
class ContourSet:
    """Polylines of ``{|W| = level}`` in ``(t, s)`` coordinates.

    ``index_polylines`` holds the same vertices as fractional (row, col)
    grid indices; ``closed[k]`` tells whether polyline ``k`` is a loop (its
    first vertex is not repeated at the end).
    """

    level: float
    polylines: list = field(default_factory=list)
    index_polylines: list = field(default_factory=list)
    closed: list = field(default_factory=list)
    min_grad_norm: float = float("nan")

    def __len__(self):
        return len(self.polylines)

    def vertices(self):
        if not self.polylines:
            return np.empty((0, 2))
        return np.concatenate(self.polylines)

    def write_csv(self, path, header_lines=()):
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(["polyline_id", "vertex_id", "t", "s"])
            for k, poly in enumerate(self.polylines):
                for v, (t, s) in enumerate(poly):
                    w.writerow([k, v, f"{t:.17g}", f"{s:.17g}"])


def _grid_axes(grid, shape):
    n_s, n_t = shape
    if grid is None:
        return np.arange(n_t, dtype=float), np.arange(n_s, dtype=float)
    if grid.scales.size != n_s or grid.n_t != n_t:
        raise DomainError("field shape does not match the grid")
    return grid.times, grid.scales


def extract_ridge(mag, grid=None):
    """Scale of maximal magnitude in every time column.

    Ties go to the smallest scale. Columns that are identically zero are
    flagged and assigned the smallest scale.
    """
    m = np.asarray(mag, dtype=float)
    if m.ndim != 2 or m.shape[0] < 2:
        raise DomainError("need a 2-D field with at least two scales")
    times, scales = _grid_axes(grid, m.shape)
    idx = np.argmax(m, axis=0)  # first occurrence, i.e. smallest scale
    zero = ~np.any(m != 0, axis=0)
    idx[zero] = 0
    boundary = (idx == 0) | (idx == m.shape[0] - 1)
    return RidgeCurve(times, scales[idx], idx, boundary, zero)


def _chain(ea, eb):
    """Link segments sharing an edge id into vertex chains.

    Returns a list of ``(segment_ids, endpoint_flags, closed)``; open chains
    come first, starting from their smallest free end.
    """
    n = ea.size
    touch = {}
    for k in range(n):
        touch.setdefault(int(ea[k]), []).append(k)
        touch.setdefault(int(eb[k]), []).append(k)
    used = np.zeros(n, dtype=bool)
    chains = []

    def walk(start_edge, k):
        edges = [start_edge]
        cur = start_edge
        while k is not None:
            used[k] = True
            nxt = int(eb[k]) if int(ea[k]) == cur else int(ea[k])
            edges.append(nxt)
            cur = nxt
            k = next((j for j in touch[cur] if not used[j]), None)
        return edges

    for e in sorted(e for e, segs in touch.items() if len(segs) == 1):
        k = touch[e][0]
        if not used[k]:
            chains.append((walk(e, k), False))
    for k in range(n):
        if not used[k]:
            edges = walk(int(ea[k]), k)
            chains.append((edges[:-1], True))
    return chains


def extract_level_set(mag, grid=None, c=None):
    """Level curves ``{mag = c}`` by marching squares.

    Rows of ``mag`` are scales, columns are times. A level outside the open
    range of the field gives an empty :class:`ContourSet`.
    """
    m = np.asarray(mag, dtype=float)
    if m.ndim != 2 or min(m.shape) < 2:
        raise DomainError("need a 2-D field of at least 2 x 2 samples")
    if c is None or not np.isfinite(c):
        raise DomainError("level must be a finite number")
    times, scales = _grid_axes(grid, m.shape)
    out = ContourSet(float(c))
    if not (m.min() < c < m.max()):
        return out
    ea, eb, pts = kernels.marching_segments(np.ascontiguousarray(m), float(c))
    where = {}
    for k in range(ea.size):
        where[int(ea[k])] = pts[k, 0]
        where[int(eb[k])] = pts[k, 1]
    rows = np.arange(m.shape[0], dtype=float)
    cols = np.arange(m.shape[1], dtype=float)
    for edges, closed in _chain(ea, eb):
        ij = np.array([where[e] for e in edges])
        ts = np.column_stack([np.interp(ij[:, 1], cols, times), np.interp(ij[:, 0], rows, scales)])
        out.index_polylines.append(ij)
        out.polylines.append(ts)
        out.closed.append(closed)
    return out


def bilinear(f, ij):
    """Bilinear interpolation of ``f`` at fractional (row, col) points."""
    f = np.asarray(f, dtype=float)
    ij = np.atleast_2d(ij)
    r = np.clip(ij[:, 0], 0, f.shape[0] - 1)
    c = np.clip(ij[:, 1], 0, f.shape[1] - 1)
    r0 = np.minimum(np.floor(r).astype(int), f.shape[0] - 2)
    c0 = np.minimum(np.floor(c).astype(int), f.shape[1] - 2)
    a, b = r - r0, c - c0
    return ((1 - a) * (1 - b) * f[r0, c0] + (1 - a) * b * f[r0, c0 + 1]
            + a * (1 - b) * f[r0 + 1, c0] + a * b * f[r0 + 1, c0 + 1])


def _grad_norm(power):
    gr, gc = np.gradient(power)
    return np.hypot(gr, gc)


def contour_regularity_report(W, c):
    """Smallest gradient norm of ``|W|^2`` over the vertices of ``{|W| = c}``.

    Central differences in grid-index units, bilinearly interpolated to
    the vertices. When ``c`` equals the field maximum the contour
    degenerates to the maximising samples, which are used instead. Returns
    NaN when the level set is empty.
    """
    vals = W.values if isinstance(W, ComplexField) else np.asarray(W)
    mag = np.abs(vals)
    gn = _grad_norm(mag ** 2)
    cs = extract_level_set(mag, None, c)
    if len(cs):
        ij = np.concatenate(cs.index_polylines)
        return float(bilinear(gn, ij).min())
    peak = mag.max()
    hits = np.argwhere(np.abs(mag - c) <= 1e-12 * peak)
    if hits.size:
        return float(gn[hits[:, 0], hits[:, 1]].min())
    return float("nan")


def near_critical_levels(W, levels, rel=NEAR_CRITICAL_REL):
    """Flags for levels whose contour passes within ``rel * max|grad|W|^2|``
    of a critical point, with the minimum gradient norms."""
    vals = W.values if isinstance(W, ComplexField) else np.asarray(W)
    floor = rel * _grad_norm(np.abs(vals) ** 2).max()
    mins = np.array([contour_regularity_report(vals, c) for c in levels])
    return mins < floor, mins
