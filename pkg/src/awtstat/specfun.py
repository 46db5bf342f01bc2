"""Special functions used by the distribution and covariance formulas.

Modified Bessel functions I0, I1 (plain and exponentially scaled), K0,
the error function, Laguerre polynomials and 2F1(3/2, 3/2; c; x) for
c in {1, 2}. Kernels come from :mod:`awtstat._backend`.
"""
from dataclasses import dataclass

import numpy as np
import scipy.special

from ._backend import kernels
from .errors import DomainError, UnsupportedError

MAX_LAGUERRE_ORDER = 200


@dataclass(frozen=True)
class ScaledBessel:
    """A Bessel value stored as ``value * exp(log_scale)``."""

    value: float
    log_scale: float

    def __float__(self):
        return float(self.value * np.exp(self.log_scale))

    @property
    def log(self):
        return float(np.log(self.value) + self.log_scale)


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return float(arr) if scalar else arr


def bessel_i(order, x, scaled=False):
    """Modified Bessel function of the first kind, order 0 or 1.

    Parameters
    ----------
    order : {0, 1}
    x : float or array_like
        Nonnegative argument.
    scaled : bool
        If True return ``exp(-x) * I_order(x)``, which never overflows.

    Returns
    -------
    float or ndarray

    Notes
    -----
    Power series for ``x <= 15`` and the large-argument expansion beyond,
    truncated adaptively at the smallest term.
    """
    if order not in (0, 1):
        raise UnsupportedError(f"bessel_i supports orders 0 and 1, got {order}")
    arr, scalar = _as_array(x)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("bessel_i requires finite x >= 0")
    val = kernels.bessel_ie(np.atleast_1d(arr), order).reshape(arr.shape)
    if not scaled:
        with np.errstate(over="ignore"):
            val = val * np.exp(arr)
    return _out(val, scalar)


def scaled_bessel_i(order, x):
    """``I_order(x)`` as a :class:`ScaledBessel` with ``log_scale = x``."""
    return ScaledBessel(bessel_i(order, float(x), scaled=True), float(x))


def log_bessel_i0(x):
    """``log I0(x)`` without overflow."""
    arr, scalar = _as_array(x)
    return _out(np.log(bessel_i(0, arr, scaled=True)) + arr, scalar)


def bessel_k0(x, scaled=False):
    """Modified Bessel function of the second kind, order 0.

    Parameters
    ----------
    x : float or array_like
        Strictly positive argument.
    scaled : bool
        If True return ``exp(x) * K0(x)``.

    Notes
    -----
    Series with harmonic-number coefficients for ``x <= 2``; above that the
    trapezoid rule on ``int_0^inf exp(-x (cosh u - 1)) du``, which converges
    geometrically because the integrand is analytic in a strip.
    """
    arr, scalar = _as_array(x)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("bessel_k0 requires finite x > 0")
    val = kernels.bessel_k0e(np.atleast_1d(arr)).reshape(arr.shape)
    if not scaled:
        val = val * np.exp(-arr)
    return _out(val, scalar)


def erf(x):
    """Error function (delegates to :func:`scipy.special.erf`)."""
    arr, scalar = _as_array(x)
    if not np.all(np.isfinite(arr)):
        raise DomainError("erf requires finite x")
    return _out(scipy.special.erf(arr), scalar)


def hyp2f1_33c(c, x):
    """Gauss hypergeometric function 2F1(3/2, 3/2; c; x).

    Parameters
    ----------
    c : {1, 2}
    x : float or array_like
        Argument in ``[0, 1)``.

    Notes
    -----
    For ``x <= 0.75`` the power series is summed until the geometric tail
    bound falls below 1e-16 of the sum. Above 0.75 the series in ``1 - x``
    from the logarithmic connection formula is used (c - a - b = -1 for
    c = 2 and -2 for c = 1)::

        c=2: 4/(pi w) + (1/pi) sum_k A_k w^k [ln w - psi(k+1) - psi(k+2) + 2 psi(k+3/2)]
        c=1: 4/(pi w^2) (1 - w/4) - (1/(4 pi)) sum_k B_k w^k [ln w - psi(k+1) - psi(k+3) + 2 psi(k+3/2)]

    with ``w = 1 - x``, ``A_k = ((3/2)_k)^2/(k!(k+1)!)`` and
    ``B_k = ((3/2)_k)^2/(k!(k+2)!)``. The digamma values follow from
    ``psi(3/2) = 2 - gamma - 2 ln 2`` and ``psi(n+1) = -gamma + H_n``.
    """
    if c not in (1, 2):
        raise UnsupportedError(f"hyp2f1_33c supports c in {{1, 2}}, got {c}")
    arr, scalar = _as_array(x)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0) or np.any(arr >= 1):
        raise DomainError("hyp2f1_33c requires 0 <= x < 1")
    val = kernels.hyp2f1_33c(int(c), np.atleast_1d(arr)).reshape(arr.shape)
    return _out(val, scalar)


def laguerre(k, x):
    """Laguerre polynomial ``L_k(x)`` by the three-term recurrence."""
    k = int(k)
    if k < 0:
        raise DomainError("laguerre order must be >= 0")
    if k > MAX_LAGUERRE_ORDER:
        raise UnsupportedError(f"laguerre order {k} exceeds {MAX_LAGUERRE_ORDER}")
    arr, scalar = _as_array(x)
    val = kernels.laguerre(k, np.atleast_1d(arr)).reshape(arr.shape)
    return _out(val, scalar)
