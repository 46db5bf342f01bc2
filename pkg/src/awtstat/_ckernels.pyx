# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``.

Same algorithms and cut-over points; scalar loops instead of array passes.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt, sinh, fabs, M_PI

cnp.import_array()

cdef double EULER_GAMMA = 0.57721566490153286061
cdef double PSI_HALF = 2.0 - 0.57721566490153286061 - 2.0 * 0.69314718055994530942


cdef double _ie(double x, int nu) noexcept nogil:
    cdef double y, term, total, mu, new
    cdef int k
    if x <= 15.0:
        y = 0.25 * x * x
        term = 0.5 * x if nu == 1 else 1.0
        total = term
        for k in range(1, 200):
            term = term * y / (k * (k + nu))
            total += term
            if term <= 1e-17 * total:
                break
        return total * exp(-x)
    mu = 4.0 * nu * nu
    term = 1.0
    total = 1.0
    for k in range(1, 40):
        new = -term * (mu - (2 * k - 1) * (2 * k - 1)) / (k * 8.0 * x)
        if fabs(new) >= fabs(term):
            break
        term = new
        total += term
        if fabs(term) <= 1e-17 * fabs(total):
            break
    return total / sqrt(2.0 * M_PI * x)


cdef double _k0e(double x) noexcept nogil:
    cdef double y, term, i0, tail, h, total, v, sh
    cdef int k
    if x <= 2.0:
        y = 0.25 * x * x
        term = 1.0
        i0 = 1.0
        tail = 0.0
        h = 0.0
        for k in range(1, 60):
            term = term * y / (k * k)
            h += 1.0 / k
            i0 += term
            tail += term * h
            if term * h <= 1e-17 * (tail + 1e-300):
                break
        return (-(log(0.5 * x) + EULER_GAMMA) * i0 + tail) * exp(x)
    h = 0.23 / sqrt(x)
    total = 0.5
    k = 1
    while True:
        sh = sinh(0.5 * k * h)
        v = exp(-2.0 * x * sh * sh)
        total += v
        if v < 1e-18 * total:
            break
        k += 1
    return h * total


cdef double _hyp_direct(double c, double x) noexcept nogil:
    cdef double term = 1.0, total = 1.0, ratio
    cdef int k = 0
    while True:
        term *= (1.5 + k) * (1.5 + k) / ((c + k) * (k + 1.0)) * x
        total += term
        k += 1
        ratio = (1.5 + k) * (1.5 + k) / ((c + k) * (k + 1.0)) * x
        if ratio < 1.0 and term * ratio / (1.0 - ratio) < 1e-16 * total:
            break
        if k > 5000:
            break
    return total


cdef double _hyp_log(int c, double x) noexcept nogil:
    cdef double w = 1.0 - x
    cdef double lw = log(w)
    cdef double psi_a = PSI_HALF
    cdef double psi_k1 = -EULER_GAMMA
    cdef double psi_km, coef, total = 0.0, term
    cdef int k = 0
    cdef int m = 1 if c == 2 else 2
    if m == 1:
        psi_km = psi_k1 + 1.0
        coef = 1.0
    else:
        psi_km = psi_k1 + 1.5
        coef = 0.5
    while True:
        term = coef * (lw - psi_k1 - psi_km + 2.0 * psi_a)
        total += term
        if k > 3 and fabs(term) < 1e-17 * fabs(total):
            break
        coef *= (1.5 + k) * (1.5 + k) / ((k + 1.0) * (k + 1.0 + m)) * w
        psi_a += 1.0 / (1.5 + k)
        psi_k1 += 1.0 / (k + 1.0)
        psi_km += 1.0 / (k + 1.0 + m)
        k += 1
        if k > 2000:
            break
    if m == 1:
        return 4.0 / (M_PI * w) + total / M_PI
    return 4.0 / (M_PI * w * w) * (1.0 - 0.25 * w) - total / (4.0 * M_PI)


def bessel_ie(x, int nu):
    cdef cnp.ndarray[double, ndim=1] xa = np.ascontiguousarray(np.ravel(x), dtype=float)
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i, n = xa.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _ie(xa[i], nu)
    return out.reshape(np.shape(x))


def bessel_k0e(x):
    cdef cnp.ndarray[double, ndim=1] xa = np.ascontiguousarray(np.ravel(x), dtype=float)
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i, n = xa.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _k0e(xa[i])
    return out.reshape(np.shape(x))


def hyp2f1_33c(int c, x):
    cdef cnp.ndarray[double, ndim=1] xa = np.ascontiguousarray(np.ravel(x), dtype=float)
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i, n = xa.shape[0]
    with nogil:
        for i in range(n):
            if xa[i] <= 0.75:
                out[i] = _hyp_direct(c, xa[i])
            else:
                out[i] = _hyp_log(c, xa[i])
    return out.reshape(np.shape(x))


def laguerre(int k, x):
    cdef cnp.ndarray[double, ndim=1] xa = np.ascontiguousarray(np.ravel(x), dtype=float)
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i, n = xa.shape[0]
    cdef int j
    cdef double prev, cur, nxt, xv
    with nogil:
        for i in range(n):
            xv = xa[i]
            prev = 1.0
            cur = 1.0 - xv
            if k == 0:
                out[i] = 1.0
                continue
            for j in range(1, k):
                nxt = ((2 * j + 1 - xv) * cur - j * prev) / (j + 1)
                prev = cur
                cur = nxt
            out[i] = cur
    return out.reshape(np.shape(x))


# Per case code: up to two (edge, edge) pairs; edges 0=b, 1=r, 2=t, 3=l.
cdef int CASES[16][4]
CASES[:] = [
    [-1, -1, -1, -1], [3, 0, -1, -1], [0, 1, -1, -1], [3, 1, -1, -1],
    [1, 2, -1, -1], [-1, -1, -1, -1], [0, 2, -1, -1], [3, 2, -1, -1],
    [3, 2, -1, -1], [0, 2, -1, -1], [-1, -1, -1, -1], [1, 2, -1, -1],
    [3, 1, -1, -1], [0, 1, -1, -1], [3, 0, -1, -1], [-1, -1, -1, -1],
]


def marching_segments(field, double level):
    cdef cnp.ndarray[double, ndim=2] f = np.ascontiguousarray(field, dtype=float)
    cdef Py_ssize_t ny = f.shape[0], nx = f.shape[1]
    cdef Py_ssize_t n_h = ny * (nx - 1)
    cdef Py_ssize_t cap = 2 * (ny - 1) * (nx - 1) + 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ea = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] eb = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=3] pts = np.empty((cap, 2, 2), dtype=float)
    cdef Py_ssize_t i, j, nseg = 0
    cdef int code, p, e, side
    cdef int pairs[4]
    cdef long long eid[4]
    cdef double er[4]
    cdef double ec[4]
    cdef double v0, v1, t, centre
    cdef int i0[4]
    cdef int j0[4]
    cdef int i1[4]
    cdef int j1[4]
    with nogil:
        for i in range(ny - 1):
            for j in range(nx - 1):
                code = ((f[i, j] > level) | ((f[i, j + 1] > level) << 1)
                        | ((f[i + 1, j + 1] > level) << 2) | ((f[i + 1, j] > level) << 3))
                if code == 0 or code == 15:
                    continue
                # edge endpoints: b, r, t, l
                i0[0] = i; j0[0] = j; i1[0] = i; j1[0] = j + 1
                i0[1] = i; j0[1] = j + 1; i1[1] = i + 1; j1[1] = j + 1
                i0[2] = i + 1; j0[2] = j; i1[2] = i + 1; j1[2] = j + 1
                i0[3] = i; j0[3] = j; i1[3] = i + 1; j1[3] = j
                eid[0] = i * (nx - 1) + j
                eid[1] = n_h + i * nx + j + 1
                eid[2] = (i + 1) * (nx - 1) + j
                eid[3] = n_h + i * nx + j
                if code == 5 or code == 10:
                    centre = 0.25 * (f[i, j] + f[i, j + 1] + f[i + 1, j + 1] + f[i + 1, j])
                    if (code == 5) == (centre > level):
                        pairs[0] = 0; pairs[1] = 1; pairs[2] = 3; pairs[3] = 2
                    else:
                        pairs[0] = 3; pairs[1] = 0; pairs[2] = 1; pairs[3] = 2
                else:
                    for p in range(4):
                        pairs[p] = CASES[code][p]
                for p in range(2):
                    if pairs[2 * p] < 0:
                        break
                    for side in range(2):
                        e = pairs[2 * p + side]
                        v0 = f[i0[e], j0[e]]
                        v1 = f[i1[e], j1[e]]
                        t = (level - v0) / (v1 - v0)
                        pts[nseg, side, 0] = i0[e] + t * (i1[e] - i0[e])
                        pts[nseg, side, 1] = j0[e] + t * (j1[e] - j0[e])
                    ea[nseg] = eid[pairs[2 * p]]
                    eb[nseg] = eid[pairs[2 * p + 1]]
                    nseg += 1
    return ea[:nseg].copy(), eb[:nseg].copy(), pts[:nseg].copy()
