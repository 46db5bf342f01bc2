"""Spectral measures of stationary Gaussian noise, path synthesis, and the
covariance / pseudo-covariance of wavelet coefficients.
"""
from dataclasses import dataclass, field
import csv
import math
import warnings

import numpy as np

from .errors import DomainError, NumericError, UnsupportedError, ValidationError

GL_ORDER = 24
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


class SpectralMeasure:
    """Absolutely continuous symmetric spectral measure ``F(dl) = f(l) dl``."""

    finite_mass = True

    def density(self, lam):
        raise NotImplementedError

    def breakpoints(self):
        """Frequencies where the density has kinks (used as panel edges)."""
        return np.empty(0)

    def mass(self):
        return covariance_from_spectrum(self, 0.0)


@dataclass(frozen=True)
class WhiteBandlimited(SpectralMeasure):
    """Flat density ``level`` on ``[-cutoff, cutoff]``."""

    cutoff: float
    level: float

    def __post_init__(self):
        if not (self.cutoff > 0 and self.level >= 0 and math.isfinite(self.cutoff)):
            raise ValidationError("WhiteBandlimited needs cutoff > 0 and level >= 0")

    @classmethod
    def for_sampling(cls, variance, dt):
        """White noise whose samples at spacing ``dt`` have the given variance."""
        return cls(math.pi / dt, variance * dt / (2.0 * math.pi))

    def density(self, lam):
        lam = np.abs(np.asarray(lam, dtype=float))
        return np.where(lam <= self.cutoff, self.level, 0.0)


@dataclass(frozen=True)
class WhiteImproper(SpectralMeasure):
    """Lebesgue measure times ``level``; infinite mass, usable for covariances only."""

    level: float = 1.0
    finite_mass = False
    cutoff = math.inf

    def __post_init__(self):
        if not self.level > 0:
            raise ValidationError("WhiteImproper needs level > 0")

    def density(self, lam):
        return np.full(np.shape(lam), float(self.level))


@dataclass(frozen=True, eq=False)
class Density(SpectralMeasure):
    """Tabulated density on ``[0, cutoff]``, linearly interpolated and
    extended evenly to negative frequencies; zero outside the table."""

    lam: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if lam.ndim != 1 or lam.size < 2 or val.shape != lam.shape:
            raise ValidationError("Density needs matching 1-D arrays with >= 2 nodes")
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(val))):
            raise ValidationError("Density table must be finite")
        if lam[0] < 0 or np.any(np.diff(lam) <= 0):
            raise ValidationError("Density frequencies must be >= 0 and strictly increasing")
        if np.any(val < 0):
            raise ValidationError("Density values must be nonnegative")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "values", val)

    @property
    def cutoff(self):
        return float(self.lam[-1])

    def density(self, lam):
        lam = np.abs(np.asarray(lam, dtype=float))
        return np.interp(lam, self.lam, self.values, left=0.0, right=0.0)

    def breakpoints(self):
        return self.lam


def load_density_csv(path):
    """Read a density table with header ``lambda,density``.

    Negative frequencies, if present, must mirror the positive ones; only
    the nonnegative half is kept.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header != ["lambda", "density"]:
            raise ValidationError(f"{path}: expected header lambda,density, got {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                lam, val = (float(v) for v in row)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: expected two numbers") from None
            rows.append((lam, val))
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    neg = arr[:, 0] < 0
    if neg.any():
        pos = dict(zip(arr[~neg, 0], arr[~neg, 1]))
        for lam, val in arr[neg]:
            if pos.get(-lam) is None or not math.isclose(pos[-lam], val, rel_tol=1e-12):
                raise ValidationError(f"{path}: density is not even at lambda={lam}")
        arr = arr[~neg]
    return Density(arr[:, 0], arr[:, 1])


def _panel_nodes(edges):
    """Gauss-Legendre nodes and weights on consecutive panels."""
    a = edges[:-1, None]
    b = edges[1:, None]
    half = 0.5 * (b - a)
    x = (a + b) * 0.5 + half * _GL_X[None, :]
    w = half * _GL_W[None, :]
    return x.ravel(), w.ravel()


def _refine(edges):
    mid = 0.5 * (edges[:-1] + edges[1:])
    out = np.empty(edges.size * 2 - 1)
    out[0::2] = edges
    out[1::2] = mid
    return out


def integrate_panels(g, lo, hi, breaks=(), n_panels=8, rtol=1e-8, atol=0.0, max_levels=12):
    """Integrate a smooth (complex) function over ``[lo, hi]``, ``lo > 0``.

    Composite Gauss-Legendre on log-spaced panels, all panels bisected until
    successive estimates agree to a hundredth of ``max(rtol * |I|, atol)``.
    If that is not reached within ``max_levels`` bisections the result is
    still accepted when the last change is within ``max(rtol * |I|, atol)``.

    Returns
    -------
    value, error_estimate
    """
    edges = np.geomspace(lo, hi, n_panels + 1)
    breaks = np.asarray(breaks, dtype=float)
    breaks = breaks[(breaks > lo) & (breaks < hi)]
    if breaks.size:
        edges = np.unique(np.concatenate([edges, breaks]))
    x, w = _panel_nodes(edges)
    prev = np.sum(w * g(x))
    err = math.inf
    for _ in range(max_levels):
        edges = _refine(edges)
        x, w = _panel_nodes(edges)
        cur = np.sum(w * g(x))
        err = abs(cur - prev)
        if err <= 0.01 * max(rtol * abs(cur), atol):
            return cur, err
        prev = cur
    if err <= max(rtol * abs(cur), atol):
        return cur, err
    raise NumericError(f"quadrature did not converge on [{lo:g}, {hi:g}]", achieved=err)


def covariance_from_spectrum(F, t):
    """Covariance ``C(t) = int exp(i t l) F(dl)`` of the noise (real by symmetry)."""
    if not F.finite_mass:
        raise UnsupportedError("covariance of an improper (infinite-mass) measure")
    t = float(t)
    if isinstance(F, WhiteBandlimited):
        if t == 0.0:
            return 2.0 * F.cutoff * F.level
        return 2.0 * F.level * math.sin(F.cutoff * t) / t
    # piecewise-linear density: Gauss-Legendre per segment, segments split so
    # that each spans at most about one radian of the cosine
    nodes = F.lam
    total = 0.0
    for a, b in zip(nodes[:-1], nodes[1:]):
        k = max(1, int(math.ceil((b - a) * abs(t))))
        edges = np.linspace(a, b, k + 1)
        x, w = _panel_nodes(edges)
        total += np.sum(w * F.density(x) * np.cos(t * x))
    return 2.0 * total


def _rfft_variances(F, n_times, dt):
    n_freq = n_times // 2 + 1
    dlam = 2.0 * math.pi / (n_times * dt)
    lam = dlam * np.arange(n_freq)
    if F.cutoff > math.pi / dt * (1 + 1e-12):
        warnings.warn("spectral measure extends beyond the Nyquist frequency; "
                      "the excess is dropped from synthesized paths", stacklevel=3)
    return lam, F.density(lam) * dlam


def path_rng(seed, index):
    """Independent generator for path ``index`` of the run keyed by ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def spectral_coefficients(F, n_times, dt, n_paths, seed, first=0):
    """Random rfft coefficients of synthesized paths ``first .. first+n_paths-1``.

    Coefficient ``k`` of a path equals ``n_times * Z_k`` where ``Z_k`` is the
    spectral increment on the bin around ``2 pi k / (n_times dt)``; the
    inverse real FFT of a row is the path.
    """
    if not F.finite_mass:
        raise UnsupportedError("path synthesis needs a finite-mass spectral measure")
    if n_paths <= 0:
        raise DomainError("n_paths must be positive")
    if n_times < 2 or not dt > 0:
        raise DomainError("need n_times >= 2 and dt > 0")
    lam, var = _rfft_variances(F, n_times, dt)
    n_freq = lam.size
    sd = np.sqrt(var)
    real_bins = np.zeros(n_freq, dtype=bool)
    real_bins[0] = True
    if n_times % 2 == 0:
        real_bins[-1] = True
    cplx_sd = np.where(real_bins, sd, sd / math.sqrt(2.0))
    im_sd = np.where(real_bins, 0.0, sd / math.sqrt(2.0))
    out = np.empty((n_paths, n_freq), dtype=complex)
    for i in range(n_paths):
        z = path_rng(seed, first + i).standard_normal((2, n_freq))
        out[i].real = z[0] * cplx_sd
        out[i].imag = z[1] * im_sd
    out *= n_times
    return out


def synthesize_paths(F, n_times, dt, n_paths, seed, first=0):
    """Zero-mean stationary Gaussian paths by the spectral representation.

    Independent complex Gaussian increments with variance ``f(l_k) dl`` are
    drawn on the bins ``l_k = 2 pi k / (n_times dt)``, ``0 <= k <= n_times/2``;
    the zero and Nyquist bins are real and negative bins are the conjugates
    of positive ones, so paths are real. The variance of every sample is the
    trapezoid approximation of the total mass.

    Parameters
    ----------
    F : SpectralMeasure
        Finite-mass measure.
    n_times : int
    dt : float
    n_paths : int
    seed : int
        Path ``i`` uses its own substream keyed by ``(seed, first + i)``.
    first : int
        Index of the first path, so batches can be generated independently.

    Returns
    -------
    ndarray, shape (n_paths, n_times)
    """
    coef = spectral_coefficients(F, n_times, dt, n_paths, seed, first)
    return np.fft.irfft(coef, n=n_times, axis=1)


@dataclass
class GammaMatrix:
    """Covariance ``E[W_l conj(W_l')]`` and pseudo-covariance ``E[W_l W_l']``
    of wavelet coefficients at points ``(t, s)``."""

    points: list
    gamma: np.ndarray
    pseudo: np.ndarray
    errors: np.ndarray = None

    def condition_number(self):
        return float(np.linalg.cond(self.gamma))

    def rcond(self):
        c = self.condition_number()
        return 0.0 if not np.isfinite(c) else 1.0 / c

    def write_csv(self, path):
        n = len(self.points)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["l", "lp", "re", "im", "pseudo_re", "pseudo_im"])
            for i in range(n):
                for j in range(n):
                    g, c = self.gamma[i, j], self.pseudo[i, j]
                    w.writerow([i, j] + [f"{v:.17g}" for v in (g.real, g.imag, c.real, c.imag)])


# Each factor is kept down to |psi_hat|^2 = 1e-40 of its peak: for very
# different scales the other factor can still be O(1) at the cut, so the
# product needs a much deeper cut than either factor alone.
SUPPORT_REL = 1e-40


def _integration_range(spec, F, s1, s2):
    lo_w, hi_w = spec.support(SUPPORT_REL)
    lo = max(lo_w / s1, lo_w / s2)
    hi = min(hi_w / s1, hi_w / s2, F.cutoff)
    return lo, hi


def _breaks(spec, F, s1, s2):
    parts = [F.breakpoints()]
    nodes = getattr(spec, "lam", None)
    if nodes is not None:
        parts += [nodes / s1, nodes / s2]
    return np.concatenate(parts) if parts else np.empty(0)


def _pair_integral(spec, F, t1, s1, t2, s2, kind, rtol, scale):
    """One entry of Gamma (``kind='gamma'``) or of the pseudo-covariance."""
    dt = t1 - t2
    root = math.sqrt(s1 * s2)
    ph = spec.psi_hat

    if kind == "gamma":
        def pos(x):
            return np.exp(1j * dt * x) * np.conj(ph(s1 * x)) * ph(s2 * x) * F.density(x)

        def neg(x):
            return np.exp(-1j * dt * x) * np.conj(ph(-s1 * x)) * ph(-s2 * x) * F.density(x)
    else:
        def pos(x):
            return np.exp(1j * dt * x) * np.conj(ph(s1 * x)) * np.conj(ph(-s2 * x)) * F.density(x)

        def neg(x):
            return np.exp(-1j * dt * x) * np.conj(ph(-s1 * x)) * np.conj(ph(s2 * x)) * F.density(x)

    if kind == "gamma" or not spec.analytic:
        lo, hi = _integration_range(spec, F, s1, s2)
        if kind != "gamma":
            # pseudo: psi_hat(s1 x) against psi_hat(-s2 x), both on positive arguments
            lo_w, hi_w = spec.support(SUPPORT_REL)
            lo, hi = max(lo_w / s1, lo_w / s2), min(hi_w / s1, hi_w / s2, F.cutoff)
    else:
        return 0j, 0.0
    if not lo < hi:
        return 0j, 0.0
    br = _breaks(spec, F, s1, s2)
    total, err = integrate_panels(pos, lo, hi, br, rtol=rtol, atol=1e-14 * scale / root)
    if not spec.analytic:
        v, e = integrate_panels(neg, lo, hi, br, rtol=rtol, atol=1e-14 * scale / root)
        total += v
        err += e
    return root * total, root * err


def compute_gamma(F, spec, points, rtol=1e-8, check_psd=True):
    """Covariance matrix and pseudo-covariance of wavelet coefficients of noise.

    Entries are ``sqrt(s s') int exp(i (t - t') l) conj(psi_hat(s l)) psi_hat(s' l) F(dl)``
    and the pseudo-covariance replaces ``psi_hat(s' l)`` by ``conj(psi_hat(-s' l))``.
    Only ``l <= l'`` are integrated; the rest follow by Hermitian symmetry.

    Parameters
    ----------
    F : SpectralMeasure
    spec : Wavelet
    points : sequence of (t, s)
    rtol : float
        Relative agreement required between successive panel refinements.

    Returns
    -------
    GammaMatrix
    """
    pts = [(float(t), float(s)) for t, s in points]
    if not pts:
        raise DomainError("compute_gamma needs at least one point")
    if any(not (s > 0 and math.isfinite(s) and math.isfinite(t)) for t, s in pts):
        raise DomainError("all scales must be positive and finite")
    n = len(pts)
    gam = np.zeros((n, n), dtype=complex)
    pse = np.zeros((n, n), dtype=complex)
    err = np.zeros((n, n))
    for i in range(n):
        t, s = pts[i]
        v, e = _pair_integral(spec, F, t, s, t, s, "gamma", rtol, 0.0)
        gam[i, i] = v.real
        err[i, i] = e
    diag = gam.diagonal().real
    for i in range(n):
        for j in range(i, n):
            scale = math.sqrt(max(diag[i] * diag[j], 0.0))
            if j > i:
                v, e = _pair_integral(spec, F, *pts[i], *pts[j], "gamma", rtol, scale)
                gam[i, j] = v
                gam[j, i] = np.conj(v)
                err[i, j] = err[j, i] = e
            c, _ = _pair_integral(spec, F, *pts[i], *pts[j], "pseudo", rtol, scale)
            pse[i, j] = c
            # E[W_j W_i] = E[W_i W_j]
            pse[j, i] = c
    if check_psd:
        if np.any(diag <= 0):
            raise NumericError("covariance has a non-positive diagonal entry")
        floor = np.linalg.eigvalsh(gam).min()
        if floor < -1e-10 * diag.sum():
            raise NumericError(f"covariance is not positive semidefinite (eigenvalue {floor:g})",
                               achieved=floor)
    return GammaMatrix(pts, gam, pse, err)


def pseudo_cov_norm(g):
    """Largest entry modulus of the pseudo-covariance."""
    return float(np.max(np.abs(g.pseudo)))
