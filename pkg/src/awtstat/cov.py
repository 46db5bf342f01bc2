"""Second moments of wavelet-coefficient magnitudes and phases.

Closed forms for the noise-only case in terms of 2F1(3/2, 3/2; c; x), the
integral formula for squared magnitudes with a clean signal, and the
Morse / white-noise correlation formula.
"""
from dataclasses import dataclass
import math

import numpy as np

from .dist import PointContext, _gamma_array, _rice_logpdf, phase_joint_pdf_null_n2
from .errors import DegenerateError, DomainError
from .specfun import hyp2f1_33c
from .spectral import _breaks, _integration_range, integrate_panels

# correlation normalizer (4/pi - 1)^{-1} comes from Var|W| = (1 - pi/4) G
_CORR_NORM = 1.0 / (4.0 / math.pi - 1.0)


@dataclass(frozen=True)
class ReImWaveletPair:
    """Fourier transforms of the real and imaginary parts of a wavelet.

    ``psi_hat_re(l) = (psi_hat(l) + conj(psi_hat(-l))) / 2`` and
    ``psi_hat_im(l) = (psi_hat(l) - conj(psi_hat(-l))) / 2i``.
    """

    spec: object

    def psi_hat_re(self, lam):
        ph = self.spec.psi_hat
        return 0.5 * (ph(lam) + np.conj(ph(-lam)))

    def psi_hat_im(self, lam):
        ph = self.spec.psi_hat
        return (ph(lam) - np.conj(ph(-lam))) / 2j


def _ratio_x(g):
    g11, g22 = g[0, 0].real, g[1, 1].real
    x = abs(g[0, 1]) ** 2 / (g11 * g22)
    if x >= 1:
        raise DegenerateError("|G12|^2 >= G11 G22")
    return x, g11, g22


def mean_abs_null(gamma_ll):
    """``E|W| = sqrt(pi G) / 2`` for a noise-only coefficient."""
    return 0.5 * math.sqrt(math.pi * gamma_ll)


def var_abs_null(gamma_ll):
    """``Var|W| = (1 - pi/4) G`` for a noise-only coefficient."""
    return (1.0 - math.pi / 4.0) * gamma_ll


def cov_magnitudes_null(gamma):
    """``Cov(|W1|, |W2|)`` with no signal:
    ``(pi/4) sqrt(G11 G22) [(1 - x)^2 2F1(3/2, 3/2; 1; x) - 1]``, ``x = |G12|^2/(G11 G22)``."""
    x, g11, g22 = _ratio_x(_gamma_array(gamma))
    if x == 0:
        return 0.0
    return 0.25 * math.pi * math.sqrt(g11 * g22) * ((1 - x) ** 2 * hyp2f1_33c(1, x) - 1)


def corr_magnitudes_null(gamma):
    """Correlation of noise-only magnitudes,
    ``(4/pi - 1)^{-1} [(1 - x)^2 2F1(3/2, 3/2; 1; x) - 1]``."""
    x, _, _ = _ratio_x(_gamma_array(gamma))
    if x == 0:
        return 0.0
    return _CORR_NORM * ((1 - x) ** 2 * hyp2f1_33c(1, x) - 1)


def circular_cov_phases_null(gamma, with_sum=False):
    """``E[exp(i (Theta1 - Theta2))]`` with no signal.

    ``(pi/4) exp(i arg G12) (1 - x) rho 2F1(3/2, 3/2; 2; x)``, ``rho = sqrt(x)``.
    With ``with_sum`` also returns ``E[exp(i (Theta1 + Theta2))]``, which is
    zero for circularly symmetric coefficients.
    """
    g = _gamma_array(gamma)
    x, _, _ = _ratio_x(g)
    if x == 0:
        val = 0j
    else:
        val = (0.25 * math.pi * np.exp(1j * np.angle(g[0, 1])) * (1 - x) * math.sqrt(x)
               * hyp2f1_33c(2, x))
        val = complex(val)
    return (val, 0j) if with_sum else val


def phase_cov_asymptotic(gamma):
    """Leading term of ``Cov(Theta1, Theta2)`` for weak correlation,
    ``(pi/2) cos(arg G12) |G12| / sqrt(G11 G22)``."""
    g = _gamma_array(gamma)
    x, _, _ = _ratio_x(g)
    return 0.5 * math.pi * math.cos(np.angle(g[0, 1])) * math.sqrt(x)


def phase_cov_null_quadrature(gamma, nodes=256):
    """``Cov(Theta1, Theta2)`` with phases in ``[0, 2 pi)`` by tensor
    Gauss-Legendre quadrature of the null joint phase density."""
    g = _gamma_array(gamma)
    x, w = np.polynomial.legendre.leggauss(nodes)
    th = math.pi * (x + 1)
    w = math.pi * w
    t1, t2 = np.meshgrid(th, th, indexing="ij")
    p = phase_joint_pdf_null_n2(t1, t2, g)
    return float(np.sum(np.outer(w, w) * (t1 - math.pi) * (t2 - math.pi) * p))


def morse_whitenoise_gamma_ratio(alpha, t1, t2, s1, s2):
    """``G12 / sqrt(G11 G22)`` for the Morse wavelet ``l^alpha e^{-l}`` and
    white noise: ``2^{2a+1} (s1 s2)^{a+1/2} / ((s1 + s2) - i (t1 - t2))^{2a+1}``."""
    if not (s1 > 0 and s2 > 0):
        raise DomainError("scales must be positive")
    p = 2 * alpha + 1
    return complex(2 ** p * (s1 * s2) ** (alpha + 0.5) / ((s1 + s2) - 1j * (t1 - t2)) ** p)


def _component_cov(pair, F, p1, p2, which, rtol):
    """``Cov(A W(p1), B W(p2))`` for A, B in {Re, Im}.

    ``Re W`` is the transform with the real wavelet ``Re psi`` and ``Im W``
    the one with ``-Im psi`` (because of the conjugate in the transform).
    For real wavelets the integrand at ``-l`` is the conjugate of that at
    ``l``, so the integral is twice the real part over ``l > 0``.
    """
    (t1, s1), (t2, s2) = p1, p2
    ga = pair.psi_hat_re if which[0] == "re" else (lambda l: -pair.psi_hat_im(l))
    gb = pair.psi_hat_re if which[1] == "re" else (lambda l: -pair.psi_hat_im(l))
    dt = t1 - t2

    def integrand(lam):
        return np.exp(1j * dt * lam) * np.conj(ga(s1 * lam)) * gb(s2 * lam) * F.density(lam)

    lo, hi = _integration_range(pair.spec, F, s1, s2)
    if not lo < hi:
        return 0.0
    scale = math.sqrt(s1 * s2)
    val, _ = integrate_panels(integrand, lo, hi, _breaks(pair.spec, F, s1, s2),
                              rtol=rtol, atol=1e-16 / scale)
    return 2.0 * scale * val.real


def cov_sq_magnitudes(p1, p2, F, spec, W_f1=0j, W_f2=0j, rtol=1e-10):
    """``Cov(|W_Y(p1)|^2, |W_Y(p2)|^2)`` for signal plus Gaussian noise.

    For jointly Gaussian real variables ``Cov(U^2, V^2) = 4 E[U] E[V] c + 2 c^2``
    with ``c = Cov(U, V)``; the result sums this over the four pairs of
    real / imaginary parts. Does not need the wavelet to be analytic.

    Parameters
    ----------
    p1, p2 : (t, s)
    F : SpectralMeasure
    spec : Wavelet
    W_f1, W_f2 : complex
        Clean-signal coefficients at the two points.
    """
    pair = ReImWaveletPair(spec)
    parts = {"re": (complex(W_f1).real, complex(W_f2).real),
             "im": (complex(W_f1).imag, complex(W_f2).imag)}
    total = 0.0
    for a in ("re", "im"):
        for b in ("re", "im"):
            c = _component_cov(pair, F, p1, p2, (a, b), rtol)
            total += 4 * parts[a][0] * parts[b][1] * c + 2 * c * c
    return float(total)


def cov_magnitudes_general(ctx, n_r=96, n_theta=256):
    """``Cov(|W1|, |W2|)`` with a clean signal, by direct quadrature.

    ``E|W1||W2|`` integrates ``r1 r2`` against the two-point magnitude density
    (itself a phase integral) on a Gauss-Legendre grid in ``(r1, r2)`` over
    ``|W_f| +- 9 sqrt(G)``; ``E|W_l|`` integrates the Rice density. Cost is
    ``n_r^2 * n_theta`` density evaluations.
    """
    if not isinstance(ctx, PointContext):
        raise DomainError("cov_magnitudes_general needs a PointContext")
    if ctx.n != 2:
        raise DomainError("two-point context required")
    g = ctx.gamma
    g11, g22 = g[0, 0].real, g[1, 1].real
    det = (g11 * g22 - abs(g[0, 1]) ** 2)
    x, w = np.polynomial.legendre.leggauss(n_r)

    def rgrid(m, G):
        lo = max(0.0, abs(m) - 9 * math.sqrt(G))
        hi = abs(m) + 9 * math.sqrt(G)
        return 0.5 * (hi - lo) * (x + 1) + lo, 0.5 * (hi - lo) * w

    r1, w1 = rgrid(ctx.W_f[0], g11)
    r2, w2 = rgrid(ctx.W_f[1], g22)
    th = 2 * math.pi * np.arange(n_theta) / n_theta
    z1 = r1[:, None] * np.exp(1j * th)[None, :] - ctx.W_f[0]           # (n_r, n_th)
    mc = np.abs(np.conj(g[0, 1]) / g11 * z1 + ctx.W_f[1])               # (n_r, n_th)
    logp = (_rice_logpdf(r2[None, None, :], mc[:, :, None], 0.5 * det / g11)
            - (np.abs(z1) ** 2 / g11)[:, :, None])                       # (n_r, n_th, n_r)
    joint = r1[:, None] / (math.pi * g11) * np.exp(logp).sum(axis=1) * (2 * math.pi / n_theta)
    e12 = float(np.einsum("i,j,i,j,ij->", w1, w2, r1, r2, joint))
    e1 = float(np.sum(w1 * r1 * np.exp(_rice_logpdf(r1, abs(ctx.W_f[0]), 0.5 * g11))))
    e2 = float(np.sum(w2 * r2 * np.exp(_rice_logpdf(r2, abs(ctx.W_f[1]), 0.5 * g22))))
    return e12 - e1 * e2
