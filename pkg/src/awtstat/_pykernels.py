"""NumPy implementations of the numeric kernels.

These mirror ``_ckernels.pyx`` function for function and are used when the
compiled extension is unavailable. Inputs are assumed already validated by
the public wrappers in :mod:`awtstat.specfun` and :mod:`awtstat.geometry`.
"""
import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061
_SERIES_CUT = 15.0
_K0_SERIES_CUT = 2.0


def _bessel_i_series(x, nu):
    # sum_k (x^2/4)^k / (k! (k+nu)!) times (x/2)^nu, unscaled
    y = 0.25 * x * x
    term = np.ones_like(x)
    if nu == 1:
        term = 0.5 * x
    total = term.copy()
    for k in range(1, 200):
        term = term * y / (k * (k + nu))
        total += term
        if np.all(term <= 1e-17 * total):
            break
    return total


def _bessel_i_asym(x, nu):
    # e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(nu) / x^k
    mu = 4.0 * nu * nu
    term = np.ones_like(x)
    total = term.copy()
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 40):
        new = -term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        # stop each entry once the terms start growing or become negligible
        active &= np.abs(new) < np.abs(term)
        term = np.where(active, new, 0.0)
        total += term
        active &= np.abs(term) > 1e-17 * np.abs(total)
        if not active.any():
            break
    return total / np.sqrt(2.0 * np.pi * x)


def bessel_ie(x, nu):
    """Exponentially scaled I_nu for nu in {0, 1}; x >= 0 array."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x <= _SERIES_CUT
    if small.any():
        xs = x[small]
        out[small] = _bessel_i_series(xs, nu) * np.exp(-xs)
    if (~small).any():
        out[~small] = _bessel_i_asym(x[~small], nu)
    return out


def _k0_series(x):
    # K0(x) = -(ln(x/2) + gamma) I0(x) + sum_{k>=1} (x^2/4)^k / (k!)^2 H_k
    y = 0.25 * x * x
    term = np.ones_like(x)
    i0 = term.copy()
    tail = np.zeros_like(x)
    h = 0.0
    for k in range(1, 60):
        term = term * y / (k * k)
        h += 1.0 / k
        i0 += term
        tail += term * h
        if np.all(term * h <= 1e-17 * (tail + 1e-300)):
            break
    return -(np.log(0.5 * x) + EULER_GAMMA) * i0 + tail


def _k0e_trapezoid(x):
    # e^x K0(x) = int_0^inf exp(-x (cosh u - 1)) du, with cosh u - 1 written
    # as 2 sinh^2(u/2) to avoid cancellation; the integrand is analytic
    # in a strip of half-width ~ sqrt(2/x) where it stays O(e), so a step
    # proportional to 1/sqrt(x) gives uniform ~1e-16 accuracy.
    out = np.empty_like(x)
    for idx, xv in enumerate(x):
        h = 0.23 / math.sqrt(xv)
        total = 0.5
        k = 1
        while True:
            sh = math.sinh(0.5 * k * h)
            v = math.exp(-2.0 * xv * sh * sh)
            total += v
            if v < 1e-18 * total:
                break
            k += 1
        out[idx] = h * total
    return out


def bessel_k0e(x):
    """Exponentially scaled K0; x > 0 array."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x <= _K0_SERIES_CUT
    if small.any():
        xs = x[small]
        out[small] = _k0_series(xs) * np.exp(xs)
    if (~small).any():
        out[~small] = _k0e_trapezoid(x[~small])
    return out


# Digamma at half-integers and integers via recurrences.
_PSI_HALF = 2.0 - EULER_GAMMA - 2.0 * math.log(2.0)  # psi(3/2)


def _hyp_direct(c, x):
    # 2F1(3/2, 3/2; c; x) by its power series, positive terms
    term = 1.0
    total = 1.0
    k = 0
    while True:
        term *= (1.5 + k) * (1.5 + k) / ((c + k) * (k + 1.0)) * x
        total += term
        k += 1
        # ratio of successive terms tends to x, so bound the tail geometrically
        ratio = (1.5 + k) * (1.5 + k) / ((c + k) * (k + 1.0)) * x
        if ratio < 1.0 and term * ratio / (1.0 - ratio) < 1e-16 * total:
            break
        if k > 5000:
            break
    return total


def _hyp_log(c, x):
    # Logarithmic z -> 1 - z connection for a = b = 3/2, c - a - b = -m.
    w = 1.0 - x
    lw = math.log(w)
    psi_a = _PSI_HALF  # psi(3/2 + k), updated below
    psi_k1 = -EULER_GAMMA  # psi(k + 1)
    if c == 2:
        # m = 1
        psi_km = psi_k1 + 1.0  # psi(k + 2)
        coef = 1.0  # ((3/2)_k)^2 / (k! (k+1)!)
        total = 0.0
        k = 0
        while True:
            term = coef * (lw - psi_k1 - psi_km + 2.0 * psi_a)
            total += term
            if k > 3 and abs(term) < 1e-17 * abs(total):
                break
            coef *= (1.5 + k) ** 2 / ((k + 1.0) * (k + 2.0)) * w
            psi_a += 1.0 / (1.5 + k)
            psi_k1 += 1.0 / (k + 1.0)
            psi_km += 1.0 / (k + 2.0)
            k += 1
            if k > 2000:
                break
        return 4.0 / (math.pi * w) + total / math.pi
    # c == 1, m = 2
    psi_km = psi_k1 + 1.5  # psi(k + 3)
    coef = 0.5  # ((3/2)_k)^2 / (k! (k+2)!)
    total = 0.0
    k = 0
    while True:
        term = coef * (lw - psi_k1 - psi_km + 2.0 * psi_a)
        total += term
        if k > 3 and abs(term) < 1e-17 * abs(total):
            break
        coef *= (1.5 + k) ** 2 / ((k + 1.0) * (k + 3.0)) * w
        psi_a += 1.0 / (1.5 + k)
        psi_k1 += 1.0 / (k + 1.0)
        psi_km += 1.0 / (k + 3.0)
        k += 1
        if k > 2000:
            break
    return 4.0 / (math.pi * w * w) * (1.0 - 0.25 * w) - total / (4.0 * math.pi)


def hyp2f1_33c(c, x):
    """2F1(3/2, 3/2; c; x) for c in {1, 2}; x array in [0, 1)."""
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty_like(flat)
    for i, xv in enumerate(flat):
        out[i] = _hyp_direct(c, xv) if xv <= 0.75 else _hyp_log(c, xv)
    return out.reshape(x.shape)


def laguerre(k, x):
    """L_k(x) by the three-term recurrence; x array."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev
    cur = 1.0 - x
    for j in range(1, k):
        prev, cur = cur, ((2 * j + 1 - x) * cur - j * prev) / (j + 1)
    return cur


def marching_segments(field, level):
    """Iso-line segments of a 2-D field, one per crossed cell edge pair.

    Returns ``(edge_a, edge_b, pts)`` with integer edge ids and ``pts`` of
    shape (n_seg, 2, 2) holding (row, col) fractional index coordinates.
    Saddle cells are split according to the cell-average value.
    """
    f = np.asarray(field, dtype=float)
    ny, nx = f.shape
    n_h = ny * (nx - 1)

    def hid(i, j):
        return i * (nx - 1) + j

    def vid(i, j):
        return n_h + i * nx + j

    above = f > level
    ea, eb, pts = [], [], []

    def cross(i0, j0, i1, j1):
        v0 = f[i0, j0]
        v1 = f[i1, j1]
        t = (level - v0) / (v1 - v0)
        return (i0 + t * (i1 - i0), j0 + t * (j1 - j0))

    for i in range(ny - 1):
        for j in range(nx - 1):
            code = (int(above[i, j]) | (int(above[i, j + 1]) << 1)
                    | (int(above[i + 1, j + 1]) << 2) | (int(above[i + 1, j]) << 3))
            if code == 0 or code == 15:
                continue
            edges = {
                "b": (hid(i, j), (i, j, i, j + 1)),
                "r": (vid(i, j + 1), (i, j + 1, i + 1, j + 1)),
                "t": (hid(i + 1, j), (i + 1, j, i + 1, j + 1)),
                "l": (vid(i, j), (i, j, i + 1, j)),
            }
            if code in (5, 10):
                centre = 0.25 * (f[i, j] + f[i, j + 1] + f[i + 1, j + 1] + f[i + 1, j])
                pairs = _SADDLE[(code, bool(centre > level))]
            else:
                pairs = _CASES[code]
            for a, b in pairs:
                ida, ca = edges[a]
                idb, cb = edges[b]
                ea.append(ida)
                eb.append(idb)
                pts.append((cross(*ca), cross(*cb)))
    return (np.asarray(ea, dtype=np.int64), np.asarray(eb, dtype=np.int64),
            np.asarray(pts, dtype=float).reshape(-1, 2, 2))


# corner bits: 1 = (i,j), 2 = (i,j+1), 4 = (i+1,j+1), 8 = (i+1,j)
_CASES = {
    1: [("l", "b")], 2: [("b", "r")], 3: [("l", "r")], 4: [("r", "t")],
    6: [("b", "t")], 7: [("l", "t")], 8: [("l", "t")], 9: [("b", "t")],
    11: [("r", "t")], 12: [("l", "r")], 13: [("b", "r")], 14: [("l", "b")],
}
_SADDLE = {
    # high centre joins the two high corners, isolating the low ones
    (5, True): [("b", "r"), ("l", "t")],
    (5, False): [("l", "b"), ("r", "t")],
    (10, True): [("l", "b"), ("r", "t")],
    (10, False): [("b", "r"), ("l", "t")],
}
