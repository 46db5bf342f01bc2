"""Probability densities of wavelet-coefficient magnitudes and phases.

Everything is assembled in the log domain with exponentially scaled Bessel
functions and exponentiated at the end, so large SNRs do not overflow.
Covariances follow the convention ``gamma[l, l'] = E[W_l conj(W_l')]``.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import DegenerateError, DomainError, NumericError, UnsupportedError
from .specfun import bessel_i, erf, laguerre
from .spectral import GammaMatrix

TWO_PI = 2.0 * math.pi
RCOND_MIN = 1e-12


def _gamma_array(gamma):
    g = gamma.gamma if isinstance(gamma, GammaMatrix) else gamma
    g = np.atleast_2d(np.asarray(g, dtype=complex))
    if g.shape[0] != g.shape[1]:
        raise DomainError("covariance must be square")
    return g


def _check_invertible(g):
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or 1.0 / cond < RCOND_MIN:
        raise NumericError(f"covariance is numerically singular (condition number {cond:.3g})",
                           achieved=cond)
    return cond


@dataclass(eq=False)
class PointContext:
    """Clean-signal coefficients and noise covariance at ``n`` points."""

    W_f: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        self.gamma = _gamma_array(self.gamma)
        self.W_f = np.atleast_1d(np.asarray(self.W_f, dtype=complex))
        if self.W_f.shape != (self.gamma.shape[0],):
            raise DomainError("mean vector length must match the covariance size")
        self.condition = _check_invertible(self.gamma)

    @property
    def n(self):
        return self.W_f.size


def _log_i0(x):
    return np.log(bessel_i(0, x, scaled=True)) + x


def wy_pdf(w, ctx):
    """Complex Gaussian density of the coefficient vector at ``w``."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    d = w - ctx.W_f
    sign, logdet = np.linalg.slogdet(ctx.gamma)
    quad = float(np.real(np.conj(d) @ np.linalg.solve(ctx.gamma, d)))
    return math.exp(-ctx.n * math.log(math.pi) - float(logdet.real) - quad)


def rice_pdf(r, m, sigma2):
    """Rice density ``(r/s2) exp(-(r^2 + m^2)/(2 s2)) I0(m r / s2)``."""
    if not sigma2 > 0:
        raise DomainError("sigma2 must be positive")
    r = np.asarray(r, dtype=float)
    m = float(m)
    if m < 0:
        raise DomainError("noncentrality must be nonnegative")
    rp = np.maximum(r, 0.0)
    x = m * rp / sigma2
    with np.errstate(divide="ignore"):
        logp = (np.log(rp) - math.log(sigma2) - (rp - m) ** 2 / (2 * sigma2)
                + np.log(bessel_i(0, x, scaled=True)))
    out = np.where(r > 0, np.exp(logp), 0.0)
    return float(out) if out.ndim == 0 else out


def magnitude_ratio_pdf(r, q):
    """Density of ``|W_Y| / |W_f|`` at SNR ``q``.

    ``2 q r exp(-q (1 + r^2)) I0(2 q r)``. The ratio is undefined when the
    clean coefficient vanishes; ``q = 0`` returns 0 everywhere.
    """
    r = np.asarray(r, dtype=float)
    q = float(q)
    if q < 0:
        raise DomainError("q must be nonnegative")
    if q == 0:
        out = np.zeros(r.shape)
    else:
        rp = np.maximum(r, 0.0)
        with np.errstate(divide="ignore"):
            logp = (math.log(2 * q) + np.log(rp) - q * (1 - rp) ** 2
                    + np.log(bessel_i(0, 2 * q * rp, scaled=True)))
        out = np.where(r > 0, np.exp(logp), 0.0)
    return float(out) if out.ndim == 0 else out


def _det2(g):
    det = float((g[0, 0] * g[1, 1]).real - abs(g[0, 1]) ** 2)
    if not det > 0:
        raise NumericError(f"2x2 covariance has non-positive determinant {det:g}", achieved=det)
    return det


def mag_joint_pdf_null_n2(r1, r2, gamma):
    """Joint density of two noise-only magnitudes.

    ``(4 r1 r2 / det) exp(-(r1^2 G22 + r2^2 G11)/det) I0(2 |G12| r1 r2 / det)``.
    """
    g = _gamma_array(gamma)
    det = _det2(g)
    g11, g22, a12 = g[0, 0].real, g[1, 1].real, abs(g[0, 1])
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    x = 2 * a12 * r1 * r2 / det
    with np.errstate(divide="ignore"):
        logp = (math.log(4 / det) + np.log(r1) + np.log(r2)
                - (r1 ** 2 * g22 + r2 ** 2 * g11) / det + x
                + np.log(bessel_i(0, x, scaled=True)))
    out = np.where((r1 > 0) & (r2 > 0), np.exp(logp), 0.0)
    return float(out) if out.ndim == 0 else out


def mag_joint_pdf_null_n2_laguerre(r1, r2, gamma, terms=60):
    """Laguerre-series form of the null two-point magnitude density.

    Uses ``sum_k z^k L_k(x) L_k(y) = exp(-z (x+y)/(1-z)) I0(2 sqrt(z x y)/(1-z)) / (1-z)``
    with ``z = |G12|^2/(G11 G22)``, ``x = r1^2/G11``, ``y = r2^2/G22``.
    """
    g = _gamma_array(gamma)
    g11, g22 = g[0, 0].real, g[1, 1].real
    z = abs(g[0, 1]) ** 2 / (g11 * g22)
    x = r1 * r1 / g11
    y = r2 * r2 / g22
    series = sum(z ** k * laguerre(k, x) * laguerre(k, y) for k in range(terms))
    return 4 * r1 * r2 / (g11 * g22) * math.exp(-x - y) * series


def _rice_logpdf(r, m, sigma2):
    x = m * r / sigma2
    return (np.log(r) - np.log(sigma2) - (r - m) ** 2 / (2 * sigma2)
            + np.log(bessel_i(0, x, scaled=True)))


def _n2_integral(r1, r2, g, mf, nodes):
    g11, g22 = g[0, 0].real, g[1, 1].real
    det = _det2(g)
    th = TWO_PI * np.arange(nodes) / nodes
    w1 = r1 * np.exp(1j * th) - mf[0]
    # E[W2 | W1 = w] = m2 + conj(G12)/G11 (w - m1); conditional variance det/G11
    m = np.abs(np.conj(g[0, 1]) / g11 * w1 + mf[1])
    logs = _rice_logpdf(r2, m, 0.5 * det / g11) - np.abs(w1) ** 2 / g11
    top = logs.max()
    return math.log(r1 / (math.pi * g11) * TWO_PI / nodes) + top + math.log(np.exp(logs - top).sum())


def mag_joint_pdf_n2(r1, r2, ctx, nodes=256, tol=1e-6, max_nodes=8192):
    """Joint density of two magnitudes with a nonzero clean signal.

    One-dimensional integral over the phase of the first coefficient of the
    first-coefficient density times the conditional Rice density of the
    second, by the periodic trapezoid rule. Nodes are doubled until two
    successive estimates agree to ``tol`` (relative).

    The conditional mean of the second coefficient uses ``conj(G12)/G11``,
    which follows from ``G12 = E[W1 conj(W2)]``.
    """
    if ctx.n != 2:
        raise DomainError("mag_joint_pdf_n2 needs a two-point context")
    r1, r2 = float(r1), float(r2)
    if r1 <= 0 or r2 <= 0:
        return 0.0
    prev = _n2_integral(r1, r2, ctx.gamma, ctx.W_f, nodes)
    while True:
        nodes *= 2
        cur = _n2_integral(r1, r2, ctx.gamma, ctx.W_f, nodes)
        if abs(math.expm1(cur - prev)) <= tol:
            return math.exp(cur)
        if nodes >= max_nodes:
            raise NumericError("phase integral did not converge", achieved=abs(math.expm1(cur - prev)))
        prev = cur


def log_J(M, nodes=None):
    """``log`` of ``J(M) = int exp(-v* M v) dtheta_1..dtheta_n`` over the n-torus,
    ``v = exp(i theta)``, by the tensor periodic trapezoid rule."""
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    if n > 3:
        raise UnsupportedError("J(M) is implemented for n <= 3")
    if nodes is None:
        nodes = 128 if n <= 2 else 96
    th = TWO_PI * np.arange(nodes) / nodes
    grids = np.meshgrid(*([th] * n), indexing="ij")
    v = np.stack([np.exp(1j * g) for g in grids], axis=-1)
    quad = np.einsum("...i,ij,...j->...", np.conj(v), M, v).real
    top = -quad.min()
    s = np.exp(-quad - top).sum()
    return top + math.log(s) + n * math.log(TWO_PI / nodes)


def J_closed_n2(M):
    """``4 pi^2 exp(-(M11 + M22)) I0(2 |M12|)``."""
    M = np.asarray(M, dtype=complex)
    x = 2 * abs(M[0, 1])
    return 4 * math.pi ** 2 * math.exp(-(M[0, 0].real + M[1, 1].real) + x) * bessel_i(0, x, scaled=True)


def mag_joint_pdf_null_general(r, gamma, nodes=None):
    """Null joint magnitude density for ``n <= 3`` through ``J``.

    ``prod(r) / (pi^n det G) * J(diag(r) G^{-1} diag(r))``.
    """
    g = _gamma_array(gamma)
    n = g.shape[0]
    if n > 3:
        raise UnsupportedError("general null magnitude density is implemented for n <= 3")
    r = np.asarray(r, dtype=float).ravel()
    if r.size != n:
        raise DomainError("r must have one entry per point")
    if np.any(r <= 0):
        return 0.0
    _check_invertible(g)
    ginv = np.linalg.inv(g)
    M = r[:, None] * ginv * r[None, :]
    sign, logdet = np.linalg.slogdet(g)
    logp = np.log(r).sum() - n * math.log(math.pi) - logdet.real + log_J(M, nodes)
    return math.exp(logp)


def phase_marginal_pdf(theta, q, theta_f=0.0):
    """Phase density at SNR ``q`` around the clean phase ``theta_f``.

    ``exp(-q)/(2 pi) + sqrt(q)/(2 sqrt(pi)) cos(u) exp(-q sin(u)^2) (1 + erf(sqrt(q) cos u))``
    with ``u = theta - theta_f``.
    """
    if q < 0:
        raise DomainError("q must be nonnegative")
    u = np.asarray(theta, dtype=float) - theta_f
    c = np.cos(u)
    sq = math.sqrt(q)
    out = (math.exp(-q) / TWO_PI
           + sq / (2 * math.sqrt(math.pi)) * c * np.exp(-q * np.sin(u) ** 2) * (1 + erf(sq * c)))
    return float(out) if np.ndim(out) == 0 else out


def _check_corr2(g):
    if abs(g[0, 1]) ** 2 >= (g[0, 0] * g[1, 1]).real:
        raise DegenerateError("|G12|^2 >= G11 G22: the two coefficients are perfectly correlated")


def phase_joint_pdf_null_n2(theta1, theta2, gamma):
    """Null joint density of two phases; depends on ``theta2 - theta1`` only.

    With ``C = Re(G12 exp(i phi))`` and ``D = G11 G22 - C^2``::

        det/(4 pi^2 D) + det C / (4 pi^2 D^{3/2}) (pi/2 + atan(C / sqrt(D)))
    """
    g = _gamma_array(gamma)
    _check_corr2(g)
    det = _det2(g)
    phi = np.asarray(theta2, dtype=float) - np.asarray(theta1, dtype=float)
    C = np.real(g[0, 1] * np.exp(1j * phi))
    D = (g[0, 0] * g[1, 1]).real - C ** 2
    sd = np.sqrt(D)
    out = det / (4 * math.pi ** 2 * D) * (1 + C / sd * (0.5 * math.pi + np.arctan(C / sd)))
    return float(out) if np.ndim(out) == 0 else out


def phase_joint_pdf_null_general(theta, gamma, nodes=None):
    """Null joint phase density for ``n in {2, 3}`` by integration over the
    positive part of the unit sphere.

    ``(n-1)!/(2 pi^n det G) int prod(w) (w^T M w)^{-n} dw`` with
    ``M = diag(exp(-i theta)) G^{-1} diag(exp(i theta))``; Gauss-Legendre in
    one angle for n = 2 and two spherical angles for n = 3.
    """
    g = _gamma_array(gamma)
    n = g.shape[0]
    if n not in (2, 3):
        raise UnsupportedError("general null phase density is implemented for n in {2, 3}")
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.size != n:
        raise DomainError("theta must have one entry per point")
    _check_invertible(g)
    e = np.exp(1j * theta)
    M = (np.conj(e)[:, None] * np.linalg.inv(g) * e[None, :]).real
    det = np.linalg.det(g).real
    if n == 2:
        nodes = nodes or 128
        x, w = np.polynomial.legendre.leggauss(nodes)
        u = 0.25 * math.pi * (x + 1)
        w = 0.25 * math.pi * w
        om = np.stack([np.cos(u), np.sin(u)], axis=-1)
        jac = np.ones_like(u)
    else:
        nodes = nodes or 64
        x, wx = np.polynomial.legendre.leggauss(nodes)
        a = 0.25 * math.pi * (x + 1)
        wa = 0.25 * math.pi * wx
        th, ph = np.meshgrid(a, a, indexing="ij")
        w = np.outer(wa, wa).ravel()
        th, ph = th.ravel(), ph.ravel()
        om = np.stack([np.sin(ph) * np.cos(th), np.sin(ph) * np.sin(th), np.cos(ph)], axis=-1)
        jac = np.sin(ph)
    quad = np.einsum("ki,ij,kj->k", om, M, om)
    if np.any(quad <= 0):
        raise NumericError("phase-rotated precision matrix is not positive definite")
    integrand = np.prod(om, axis=1) * quad ** (-n) * jac
    return math.factorial(n - 1) / (2 * math.pi ** n * det) * float(np.sum(w * integrand))


def mag_phase_joint_pdf(r, theta, ctx):
    """Joint density of magnitude and phase of one coefficient,
    ``r/(pi G) exp(-|r e^{i theta} - W_f|^2 / G)``."""
    if ctx.n != 1:
        raise DomainError("mag_phase_joint_pdf needs a one-point context")
    G = ctx.gamma[0, 0].real
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    d2 = np.abs(r * np.exp(1j * theta) - ctx.W_f[0]) ** 2
    with np.errstate(divide="ignore"):
        out = np.where(r > 0, np.exp(np.log(np.maximum(r, 0)) - math.log(math.pi * G) - d2 / G), 0.0)
    return float(out) if out.ndim == 0 else out


def nonnull_joint_phase_pdf(*_args, **_kwargs):
    """Not implemented: no closed form is available for n >= 2 with a
    nonzero clean signal, and the n-fold radial integral is not offered as
    a substitute."""
    raise UnsupportedError("non-null joint phase density for n >= 2 is not implemented")
