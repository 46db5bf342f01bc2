"""Analytic mother wavelets defined by their Fourier transforms.

Wavelets are only ever evaluated in the frequency domain. Three families
are provided: generalized Morse, Klauder, and a tabulated custom wavelet.
"""
from dataclasses import dataclass, field
import csv
import math

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DomainError, ValidationError

MIN_CUSTOM_ROWS = 16


def _check_finite(lam):
    lam = np.asarray(lam, dtype=float)
    if not np.all(np.isfinite(lam)):
        raise DomainError("wavelet frequency argument must be finite")
    return lam


class Wavelet:
    """Common interface: ``psi_hat``, peak location and effective support."""

    analytic = True

    def psi_hat(self, lam):
        raise NotImplementedError

    def peak(self):
        """Angular frequency maximizing ``|psi_hat|`` on ``(0, inf)``."""
        raise NotImplementedError

    def center_frequency(self):
        """Center frequency in cycles per unit time, ``peak / (2 pi)``."""
        return self.peak() / (2.0 * math.pi)

    def support(self, rel=1e-16):
        """Interval ``(lo, hi)`` of positive frequencies where
        ``|psi_hat|^2 >= rel * max |psi_hat|^2``."""
        lp = self.peak()
        peak2 = abs(complex(self.psi_hat(np.array([lp]))[0])) ** 2

        def g(u):
            v = abs(complex(self.psi_hat(np.array([math.exp(u)]))[0])) ** 2
            return (math.log(v) if v > 0 else -800.0) - math.log(rel * peak2)

        u0 = math.log(lp)
        lo_u = u0 - 1.0
        while g(lo_u) > 0 and lo_u > u0 - 200:
            lo_u -= 1.0
        hi_u = u0 + 0.5
        while g(hi_u) > 0 and hi_u < u0 + 200:
            hi_u += 0.5
        lo = math.exp(brentq(g, lo_u, u0)) if g(lo_u) <= 0 else math.exp(lo_u)
        hi = math.exp(brentq(g, u0, hi_u)) if g(hi_u) <= 0 else math.exp(hi_u)
        return lo, hi


@dataclass(frozen=True)
class Morse(Wavelet):
    """Generalized Morse wavelet ``a * lam**beta1 * exp(-lam**beta2)`` for lam > 0.

    Parameters
    ----------
    beta1 : float, >= 1
    beta2 : float, > 0
    a : float, > 0
        Amplitude. Ignored when ``unit_peak`` is True.
    unit_peak : bool
        Rescale so that the peak of ``|psi_hat|`` equals 1.
    """

    beta1: float = 2.0
    beta2: float = 1.0
    a: float = 1.0
    unit_peak: bool = False

    def __post_init__(self):
        if not (self.beta1 >= 1 and self.beta2 > 0 and self.a > 0):
            raise ValidationError("Morse requires beta1 >= 1, beta2 > 0, a > 0")

    @property
    def amplitude(self):
        if not self.unit_peak:
            return self.a
        lp = self.peak()
        return math.exp(-(self.beta1 * math.log(lp) - lp ** self.beta2))

    def peak(self):
        return (self.beta1 / self.beta2) ** (1.0 / self.beta2)

    def psi_hat(self, lam):
        lam = _check_finite(lam)
        out = np.zeros(lam.shape, dtype=complex)
        pos = lam > 0
        lp = lam[pos]
        out[pos] = self.amplitude * np.exp(self.beta1 * np.log(lp) - lp ** self.beta2)
        return out


@dataclass(frozen=True)
class Klauder(Wavelet):
    """Klauder wavelet ``lam**alpha * exp(-gamma lam) * exp(i beta log lam)``."""

    alpha: float = 1.0
    beta: float = 0.0
    gamma: complex = 1.0

    def __post_init__(self):
        if not (self.alpha >= 1 and complex(self.gamma).real > 0):
            raise ValidationError("Klauder requires alpha >= 1 and Re(gamma) > 0")

    def peak(self):
        return self.alpha / complex(self.gamma).real

    def psi_hat(self, lam):
        lam = _check_finite(lam)
        out = np.zeros(lam.shape, dtype=complex)
        pos = lam > 0
        lp = lam[pos]
        ll = np.log(lp)
        out[pos] = np.exp(self.alpha * ll - complex(self.gamma) * lp + 1j * self.beta * ll)
        return out


@dataclass(frozen=True, eq=False)
class Custom(Wavelet):
    """Tabulated wavelet, linearly interpolated and zero outside the table.

    Parameters
    ----------
    lam : array_like
        Strictly increasing positive frequencies, at least 16 of them.
    values : array_like of complex
        ``psi_hat(lam)``.
    negative : array_like of complex, optional
        ``psi_hat(-lam)`` on the same nodes. Supplying it makes the wavelet
        non-analytic, which is only useful for exercising the
        pseudo-covariance code path.
    """

    lam: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    negative: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        vals = np.asarray(self.values, dtype=complex)
        if lam.ndim != 1 or lam.size < MIN_CUSTOM_ROWS:
            raise ValidationError(f"custom wavelet needs >= {MIN_CUSTOM_ROWS} nodes")
        if vals.shape != lam.shape:
            raise ValidationError("custom wavelet values must match the frequency grid")
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(vals))):
            raise ValidationError("custom wavelet table must be finite")
        if lam[0] <= 0 or np.any(np.diff(lam) <= 0):
            raise ValidationError("custom wavelet frequencies must be > 0 and strictly increasing")
        mag = np.abs(vals)
        k = int(np.argmax(mag))
        if (np.count_nonzero(mag == mag[k]) > 1 or np.any(np.diff(mag[: k + 1]) < 0)
                or np.any(np.diff(mag[k:]) > 0)):
            raise ValidationError("custom wavelet |psi_hat| must be unimodal with a unique maximum")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "values", vals)
        if self.negative is not None:
            neg = np.asarray(self.negative, dtype=complex)
            if neg.shape != lam.shape:
                raise ValidationError("negative-frequency values must match the grid")
            object.__setattr__(self, "negative", neg)

    @property
    def analytic(self):
        return self.negative is None

    def _interp(self, x, vals):
        re = np.interp(x, self.lam, vals.real, left=0.0, right=0.0)
        im = np.interp(x, self.lam, vals.imag, left=0.0, right=0.0)
        return re + 1j * im

    def psi_hat(self, lam):
        lam = _check_finite(lam)
        out = np.zeros(lam.shape, dtype=complex)
        pos = lam > 0
        out[pos] = self._interp(lam[pos], self.values)
        if self.negative is not None:
            neg = lam < 0
            out[neg] = self._interp(-lam[neg], self.negative)
        return out

    def peak(self):
        return float(self.lam[int(np.argmax(np.abs(self.values)))])

    def support(self, rel=1e-16):
        return float(self.lam[0]), float(self.lam[-1])


def eval_psi_hat(spec, lam):
    """Evaluate ``psi_hat`` of a wavelet; scalar in, complex scalar out."""
    out = spec.psi_hat(np.atleast_1d(lam))
    return complex(out[0]) if np.ndim(lam) == 0 else out


def center_frequency(spec):
    """Center frequency ``argmax |psi_hat| / (2 pi)`` in cycles per unit time."""
    return spec.center_frequency()


def numeric_peak(spec, lo=1e-6, hi=1e6, n=4096):
    """Grid argmax of ``|psi_hat|`` refined by bounded scalar minimization."""
    grid = np.geomspace(lo, hi, n)
    k = int(np.argmax(np.abs(spec.psi_hat(grid))))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, n - 1)]
    res = minimize_scalar(lambda x: -abs(complex(spec.psi_hat(np.array([x]))[0])),
                          bounds=(a, b), method="bounded", options={"xatol": 1e-12 * b})
    return float(res.x)


def load_custom_csv(path):
    """Read a custom wavelet from CSV with header ``lambda,re,im``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header != ["lambda", "re", "im"]:
            raise ValidationError(f"{path}: expected header lambda,re,im, got {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from None
            if len(rows[-1]) != 3:
                raise ValidationError(f"{path}:{lineno}: expected 3 columns")
    arr = np.array(rows, dtype=float).reshape(-1, 3)
    return Custom(arr[:, 0], arr[:, 1] + 1j * arr[:, 2])


# (derivative order k, power p, lower limit of the supremum)
DECAY_CONDITIONS = (
    (0, 1, 1.0), (0, 2, 1.0),
    (1, 0, 0.0), (1, 1, 0.0), (1, 2, 0.0),
    (2, 2, 0.0), (2, 3, 0.0),
    (3, 3, 0.0),
)


@dataclass
class DecayReport:
    suprema: dict
    finite: dict
    all_finite: bool


def _derivative(spec, lam, k):
    if k == 0:
        return spec.psi_hat(lam)
    h = lam * 1e-4
    f = spec.psi_hat
    if k == 1:
        return (f(lam + h) - f(lam - h)) / (2 * h)
    if k == 2:
        return (f(lam + h) - 2 * f(lam) + f(lam - h)) / h ** 2
    return (f(lam + 2 * h) - 2 * f(lam + h) + 2 * f(lam - h) - f(lam - 2 * h)) / (2 * h ** 3)


def decay_report(spec, grid):
    """Grid estimates of ``sup |lam^p D^k psi_hat(lam)|`` for the smoothness
    conditions behind level-set regularity.

    A supremum is declared infinite when it is attained at an end of the
    grid and exceeds the value one decade inward by more than 1%, i.e. the
    quantity is still growing where the grid stops.

    Parameters
    ----------
    spec : Wavelet
    grid : array_like
        Positive, increasing frequencies (log spacing recommended).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 16:
        raise ValidationError("decay_report needs a grid of at least 16 points")
    if grid[0] <= 0 or np.any(np.diff(grid) <= 0):
        raise ValidationError("decay_report grid must be positive and increasing")
    sup, fin = {}, {}
    for k, p, lower in DECAY_CONDITIONS:
        name = f"D{k}_{p}"
        lam = grid[grid > lower]
        if lam.size < 2:
            sup[name], fin[name] = 0.0, True
            continue
        vals = np.abs(lam ** p * _derivative(spec, lam, k))
        j = int(np.argmax(vals))
        sup[name] = float(vals[j])
        grows = False
        if j == lam.size - 1:
            ref = vals[np.searchsorted(lam, lam[-1] / 10.0)]
            grows = vals[j] > 1.01 * ref
        elif j == 0:
            ref = vals[min(np.searchsorted(lam, lam[0] * 10.0), lam.size - 1)]
            grows = vals[j] > 1.01 * ref
        fin[name] = bool(np.isfinite(vals[j]) and not grows)
    return DecayReport(sup, fin, all(fin.values()))
