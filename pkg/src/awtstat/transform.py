"""Analytic wavelet transform of sampled signals on a time-scale grid.

The transform is computed per scale in the frequency domain with a
periodic boundary: FFT of the signal, multiplication by
``sqrt(s) * conj(psi_hat(s * lam_k))`` and inverse FFT. Scales are in the
same time unit as ``dt``.
"""
from dataclasses import dataclass
import math
import warnings

import numpy as np

from .errors import DegenerateError, DomainError, ValidationError
from .spectral import compute_gamma


@dataclass(frozen=True, eq=False)
class TimeScaleGrid:
    t0: float
    dt: float
    n_t: int
    scales: np.ndarray

    def __post_init__(self):
        sc = np.asarray(self.scales, dtype=float).ravel()
        if not self.dt > 0:
            raise ValidationError("dt must be positive")
        if self.n_t < 8:
            raise ValidationError("need at least 8 time samples")
        if sc.size == 0 or np.any(sc <= 0) or not np.all(np.isfinite(sc)):
            raise ValidationError("scales must be positive and finite")
        if np.any(np.diff(sc) <= 0):
            raise ValidationError("scales must be strictly increasing")
        object.__setattr__(self, "scales", sc)
        object.__setattr__(self, "n_t", int(self.n_t))

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.n_t)

    def time_index(self, t):
        return int(round((t - self.t0) / self.dt))

    def scale_index(self, s):
        k = int(np.argmin(np.abs(self.scales - s)))
        if not math.isclose(self.scales[k], s, rel_tol=1e-9):
            raise DomainError(f"scale {s} is not on the grid")
        return k

    def coi_mask(self):
        """True where a sample lies within ``ceil(4 s / dt)`` of either edge."""
        mask = np.zeros((self.scales.size, self.n_t), dtype=bool)
        for i, s in enumerate(self.scales):
            m = min(int(math.ceil(4 * s / self.dt)), self.n_t)
            mask[i, :m] = True
            mask[i, self.n_t - m:] = True
        return mask


@dataclass(eq=False)
class ComplexField:
    """Wavelet coefficients, rows indexed by scale and columns by time."""

    grid: TimeScaleGrid
    values: np.ndarray
    mask: np.ndarray = None

    def magnitude(self):
        return magnitude_field(self)

    def phase(self):
        return phase_field(self)


@dataclass(eq=False)
class SnrField:
    grid: TimeScaleGrid
    q: np.ndarray
    gamma_diag: np.ndarray


def log_scales(smin, smax, n):
    return np.geomspace(smin, smax, int(n))


def _multipliers(spec, scales, n_t, dt):
    k = np.fft.fftfreq(n_t) * n_t
    if n_t % 2 == 0:
        # the Nyquist bin is counted as a positive frequency
        k[n_t // 2] = n_t // 2
    lam = 2.0 * math.pi * k / (n_t * dt)
    lam[0] = 0.0
    mult = np.sqrt(scales)[:, None] * np.conj(spec.psi_hat(np.outer(scales, lam)))
    mult[:, 0] = 0.0
    return mult


def awt_batch(signals, dt, spec, scales):
    """Transform a batch of signals.

    Parameters
    ----------
    signals : array_like, shape (..., n_t)
        Real or complex samples.

    Returns
    -------
    ndarray, shape (..., n_scales, n_t), complex
    """
    x = np.asarray(signals)
    if not np.all(np.isfinite(x)):
        raise DomainError("signal contains NaN or Inf")
    scales = np.asarray(scales, dtype=float)
    n_t = x.shape[-1]
    spectrum = np.fft.fft(x, axis=-1)
    mult = _multipliers(spec, scales, n_t, dt)
    dead = ~np.any(mult != 0, axis=1)
    if dead.any():
        warnings.warn(f"psi_hat vanishes on every bin at scales {scales[dead].tolist()}; "
                      "rows set to zero", stacklevel=3)
    return np.fft.ifft(spectrum[..., None, :] * mult, axis=-1)


def awt_forward(signal, dt, spec, scales, t0=0.0, coi=False):
    """Analytic wavelet transform of one sampled signal.

    Discrete analogue of ``(sqrt(s)/2pi) int exp(i t l) f_hat(l) conj(psi_hat(s l)) dl``
    on the bins ``l_k = 2 pi k / (n_t dt)``. The zero-frequency bin is dropped;
    for analytic wavelets the negative bins are multiplied by zero.

    Parameters
    ----------
    signal : array_like, shape (n_t,)
    dt : float
    spec : Wavelet
    scales : array_like
        Strictly increasing, in the time unit of ``dt``.
    t0 : float
        Time of the first sample.
    coi : bool
        Attach a mask of the samples within ``4 s`` of either edge.

    Returns
    -------
    ComplexField
    """
    x = np.asarray(signal)
    if x.ndim != 1:
        raise DomainError("awt_forward expects a 1-D signal; use awt_batch for batches")
    grid = TimeScaleGrid(t0, dt, x.size, scales)
    vals = awt_batch(x, dt, spec, grid.scales)
    return ComplexField(grid, vals, grid.coi_mask() if coi else None)


def magnitude_field(W):
    return np.abs(W.values if isinstance(W, ComplexField) else np.asarray(W))


def phase_field(W):
    """Phase in ``[0, 2 pi)``; the phase of 0 is 0."""
    v = W.values if isinstance(W, ComplexField) else np.asarray(W)
    th = np.mod(np.angle(v), 2.0 * math.pi)
    # mod can round a tiny negative angle up to exactly 2 pi
    th[th >= 2.0 * math.pi] = 0.0
    return th


def snr_field(W_f, F, spec):
    """Pointwise SNR ``|W_f|^2 / E|W_noise|^2``.

    The noise variance depends only on the scale and is computed once per
    scale.
    """
    diag = np.empty(W_f.grid.scales.size)
    for i, s in enumerate(W_f.grid.scales):
        g = compute_gamma(F, spec, [(0.0, s)], check_psd=False).gamma[0, 0].real
        if not g > 0:
            raise DegenerateError(f"noise variance vanishes at scale {s}")
        diag[i] = g
    q = np.abs(W_f.values) ** 2 / diag[:, None]
    return SnrField(W_f.grid, q, diag)


def scale_to_frequency(s, convention="fs_over_s", nu=1.0, fs=1.0, center=None, in_samples=False):
    """Frequency in Hz associated with scale ``s``.

    Parameters
    ----------
    s : float or array_like
        Scale, in time units unless ``in_samples``.
    convention : {"fs_over_s", "angular"}
        ``fs_over_s``: ``f = nu * fs / s_samples``. ``angular``:
        ``f = center / s`` with ``center`` the wavelet's center frequency in
        cycles per unit time (from :func:`awtstat.wavelets.center_frequency`).
    nu : float
        Cycles per unit scale for ``fs_over_s``.
    fs : float
        Sampling rate, needed to convert between samples and time.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise DomainError("scale must be positive")
    s_time = s / fs if in_samples else s
    if convention == "fs_over_s":
        f = nu / s_time
    elif convention == "angular":
        if center is None:
            raise DomainError("angular convention needs the wavelet center frequency")
        f = center / s_time
    else:
        raise DomainError(f"unknown convention {convention!r}")
    return float(f) if f.ndim == 0 else f
