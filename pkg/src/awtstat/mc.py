"""Monte Carlo ensembles of wavelet coefficients and empirical statistics.

Paths are generated in fixed-size chunks; path ``i`` always draws from the
substream keyed by ``(seed, i)``, so results do not depend on chunking or
on the number of worker threads.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import hashlib
import math

import numpy as np
from scipy import stats
from scipy.interpolate import CubicHermiteSpline

from .dist import phase_marginal_pdf, rice_pdf
from .errors import DomainError, ValidationError
from .spectral import synthesize_paths
from .transform import awt_batch

CHUNK = 256
Z99 = 2.5758293035489004


@dataclass(eq=False)
class Ensemble:
    seed: int
    n_paths: int
    probes: list
    samples: np.ndarray
    clean: np.ndarray

    def magnitudes(self):
        return np.abs(self.samples)

    def phases(self):
        return np.mod(np.angle(self.samples), 2 * math.pi)


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float

    def z(self, reference):
        return (self.value - reference) / self.stderr if self.stderr > 0 else math.inf


def _probe_indices(grid, probes):
    ti, si = [], []
    for t, s in probes:
        k = (t - grid.t0) / grid.dt
        if abs(k - round(k)) > 1e-9 * max(1.0, abs(k)) or not 0 <= round(k) < grid.n_t:
            raise DomainError(f"probe time {t} is not on the grid")
        ti.append(int(round(k)))
        si.append(grid.scale_index(s))
    return np.array(ti), np.array(si)


def interior_probe_times(grid, s, n=1):
    """``n`` evenly spread grid times at least ``4 s`` from either edge."""
    m = int(math.ceil(4 * s / grid.dt))
    if 2 * m >= grid.n_t:
        raise DomainError("grid too short for interior probes at this scale")
    idx = np.linspace(m, grid.n_t - 1 - m, n + 2)[1:-1] if n > 1 else [grid.n_t // 2]
    return [grid.t0 + grid.dt * int(round(i)) for i in idx]


def run_ensemble(f, F, spec, grid, probes, n_paths, seed, threads=1, chunk=CHUNK):
    """Sample ``W_Y = W_f + W_noise`` at ``probes`` over ``n_paths`` noise paths.

    Parameters
    ----------
    f : array_like of length ``grid.n_t``, or None / 0 for the null case
    F : SpectralMeasure
        Finite-mass noise spectrum.
    spec : Wavelet
    grid : TimeScaleGrid
    probes : list of (t, s)
        On-grid points.
    n_paths : int
    seed : int
    threads : int
        Worker threads over chunks of paths.

    Returns
    -------
    Ensemble
    """
    if n_paths <= 0:
        raise DomainError("n_paths must be positive")
    ti, si = _probe_indices(grid, probes)
    # only the probed scales are transformed; rows are independent
    uscales, inv = np.unique(si, return_inverse=True)
    scales = grid.scales[uscales]
    if f is None or np.isscalar(f) and f == 0:
        sig = np.zeros(grid.n_t)
    else:
        sig = np.asarray(f, dtype=float)
        if sig.shape != (grid.n_t,):
            raise DomainError("signal length must equal grid.n_t")
    clean = awt_batch(sig, grid.dt, spec, scales)[inv, ti]
    out = np.empty((n_paths, len(probes)), dtype=complex)

    def work(first):
        m = min(chunk, n_paths - first)
        y = synthesize_paths(F, grid.n_t, grid.dt, m, seed, first) + sig
        w = awt_batch(y, grid.dt, spec, scales)
        out[first:first + m] = w[:, inv, ti]

    starts = range(0, n_paths, chunk)
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            list(ex.map(work, starts))
    else:
        for s0 in starts:
            work(s0)
    return Ensemble(int(seed), int(n_paths), list(probes), out, clean)


def tone_amplitude_for_snr(spec, gamma_ss, s, omega, q):
    """Amplitude ``A`` of ``A cos(omega t)`` whose coefficient at scale ``s``
    has SNR ``q`` against a noise variance ``gamma_ss``.

    For an analytic wavelet ``|W_f| = (A/2) sqrt(s) |psi_hat(s omega)|``.
    """
    g = abs(complex(np.asarray(spec.psi_hat(s * omega)).item()))
    if g == 0:
        raise DomainError("the wavelet does not see this frequency at this scale")
    return 2 * math.sqrt(q * gamma_ss) / (math.sqrt(s) * g)


def empirical_gamma(samples):
    """Sample covariance ``mean(W_l conj W_l')`` and pseudo-covariance
    ``mean(W_l W_l')`` of zero-mean samples (paths along axis 0)."""
    w = np.asarray(samples)
    n = w.shape[0]
    return w.T @ w.conj() / n, w.T @ w / n


def _check_pair(x, y):
    x, y = np.asarray(x), np.asarray(y)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("samples must be 1-D arrays of equal length")
    return x, y


def empirical_circular_cov(th1, th2):
    """Mean of ``exp(i (th1 - th2))`` with standard errors of its real and
    imaginary parts, as ``(value, Estimate(re), Estimate(im))``."""
    th1, th2 = _check_pair(th1, th2)
    z = np.exp(1j * (th1 - th2))
    n = z.size
    v = complex(z.mean())
    re = Estimate(v.real, float(z.real.std(ddof=1) / math.sqrt(n)))
    im = Estimate(v.imag, float(z.imag.std(ddof=1) / math.sqrt(n)))
    return v, re, im


def empirical_mean(x):
    x = np.asarray(x, dtype=float)
    return Estimate(float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size)))


def empirical_var(x):
    x = np.asarray(x, dtype=float)
    d = (x - x.mean()) ** 2
    return Estimate(float(d.sum() / (x.size - 1)), float(d.std(ddof=1) / math.sqrt(x.size)))


def empirical_cov(x, y):
    """Sample covariance; the standard error is that of the mean of the
    centred products."""
    x, y = _check_pair(x, y)
    p = (x - x.mean()) * (y - y.mean())
    n = p.size
    return Estimate(float(p.sum() / (n - 1)), float(p.std(ddof=1) / math.sqrt(n)))


def empirical_corr(x, y):
    """Pearson correlation with a delta-method standard error."""
    x, y = _check_pair(x, y)
    zx = (x - x.mean()) / x.std()
    zy = (y - y.mean()) / y.std()
    r = float(np.mean(zx * zy))
    infl = zx * zy - 0.5 * r * (zx ** 2 + zy ** 2)
    return Estimate(r, float(infl.std(ddof=1) / math.sqrt(x.size)))


def cdf_from_pdf(pdf, lo, hi, n=2048):
    """CDF on ``[lo, hi]`` from a density, by 8-point Gauss-Legendre per
    panel and cubic Hermite interpolation with the density as slope."""
    edges = np.linspace(lo, hi, n + 1)
    x, w = np.polynomial.legendre.leggauss(8)
    h = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = mid[:, None] + h[:, None] * x[None, :]
    panel = h * (np.asarray(pdf(nodes.ravel())).reshape(nodes.shape) @ w)
    cum = np.concatenate([[0.0], np.cumsum(panel)])
    spline = CubicHermiteSpline(edges, cum, np.asarray(pdf(edges), dtype=float))

    def cdf(v):
        v = np.asarray(v, dtype=float)
        return np.clip(spline(np.clip(v, lo, hi)), 0.0, 1.0)

    cdf.mass = float(cum[-1])
    return cdf


def rice_cdf(m, sigma2):
    sd = math.sqrt(sigma2)
    lo = max(0.0, m - 12 * sd)
    return cdf_from_pdf(lambda r: rice_pdf(r, m, sigma2), lo, m + 12 * sd)


def phase_cdf(q, theta_f=0.0):
    """CDF of the phase in ``[0, 2 pi)``."""
    return cdf_from_pdf(lambda t: phase_marginal_pdf(t, q, theta_f), 0.0, 2 * math.pi, n=4096)


def uniform_phase_cdf(theta):
    return np.clip(np.asarray(theta, dtype=float) / (2 * math.pi), 0.0, 1.0)


def ks_against(cdf, samples):
    """Two-sided Kolmogorov-Smirnov statistic of ``samples`` against ``cdf``."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 100:
        raise DomainError("KS needs at least 100 samples")
    return float(stats.kstest(x, cdf).statistic)


def ks_line(n, level=0.01):
    """Asymptotic KS critical value; 1.63/sqrt(n) at the 1% level."""
    c = {0.01: 1.63, 0.05: 1.36}[level]
    return c / math.sqrt(n)


def magnitude_histogram(x):
    """Freedman-Diaconis histogram as (bin mass, edges)."""
    x = np.asarray(x, dtype=float)
    counts, edges = np.histogram(x, bins=np.histogram_bin_edges(x, bins="fd"))
    return counts / x.size, edges


def phase_histogram(theta, bins=64):
    theta = np.asarray(theta, dtype=float)
    counts, edges = np.histogram(np.mod(theta, 2 * math.pi), bins=bins, range=(0, 2 * math.pi))
    return counts / theta.size, edges


def _merge_empty(table):
    """Merge zero-total rows and columns into their neighbours."""
    for axis in (0, 1):
        t = table if axis == 0 else table.T
        keep = []
        acc = None
        for row in t:
            acc = row.copy() if acc is None else acc + row
            if acc.sum() > 0:
                keep.append(acc)
                acc = None
        if acc is not None and keep:
            keep[-1] = keep[-1] + acc
        t = np.array(keep)
        table = t if axis == 0 else t.T
    return table


@dataclass(frozen=True)
class IndependenceResult:
    statistic: float
    pvalue: float
    dof: int
    table: np.ndarray


def independence_test(mag, phase, bins=8):
    """Chi-square test of independence between magnitudes and phases.

    Magnitudes are binned at their sample quantiles, phases uniformly on
    ``[0, 2 pi)``; with 8 x 8 bins the statistic has 49 degrees of freedom.
    """
    mag, phase = _check_pair(np.asarray(mag, dtype=float), np.asarray(phase, dtype=float))
    if mag.size < bins * bins:
        raise DomainError("too few samples for the contingency table")
    medges = np.quantile(mag, np.linspace(0, 1, bins + 1))
    mi = np.clip(np.searchsorted(medges, mag, side="right") - 1, 0, bins - 1)
    pi_ = np.clip((np.mod(phase, 2 * math.pi) / (2 * math.pi) * bins).astype(int), 0, bins - 1)
    table = np.zeros((bins, bins))
    np.add.at(table, (mi, pi_), 1)
    table = _merge_empty(table)
    if min(table.shape) < 2:
        return IndependenceResult(0.0, 1.0, 0, table)
    res = stats.chi2_contingency(table, correction=False)
    return IndependenceResult(float(res.statistic), float(res.pvalue), int(res.dof), table)


def wilson_interval(k, n, z=Z99):
    """Wilson score interval for ``k`` successes in ``n`` trials."""
    if n <= 0 or not 0 <= k <= n:
        raise DomainError("need 0 <= k <= n and n > 0")
    p = k / n
    d = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / d
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / d
    return max(0.0, centre - half), min(1.0, centre + half)


def bound_holds(k, n, bound, z=Z99):
    """One-sided check of ``P <= bound`` from ``k`` of ``n``: the bound must
    not lie below the Wilson lower limit."""
    return wilson_interval(k, n, z)[0] <= bound


@dataclass(frozen=True)
class Frequency:
    k: int
    n: int
    lower: float
    upper: float

    @property
    def value(self):
        return self.k / self.n


def event_frequency(events, z=Z99):
    e = np.asarray(events, dtype=bool)
    k, n = int(e.sum()), e.size
    lo, hi = wilson_interval(k, n, z)
    return Frequency(k, n, lo, hi)


def ridge_misid_frequency(ens, delta, pairs):
    """Frequency of ``|W_Y(ridge)| < (1 - delta) |W_Y(other)|`` per probe pair.

    ``pairs`` holds ``(ridge_probe, other_probe)`` column indices into the
    ensemble samples; the ridge scale is taken from the clean field.
    """
    if not 0 <= delta < 1:
        raise DomainError("delta must lie in [0, 1)")
    mag = np.abs(ens.samples)
    return [event_frequency(mag[:, a] < (1 - delta) * mag[:, b]) for a, b in pairs]


MANIFEST_KEYS = ("subcommand", "kind", "wavelet", "spectrum", "scales", "n_t", "dt", "seed",
                 "paths", "probes", "signal", "levels", "q", "delta", "eps", "out", "format",
                 "threads")


def run_id(config):
    """Short deterministic identifier of a run configuration."""
    text = "\n".join(f"{k}={config[k]}" for k in sorted(config))
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def write_manifest(path, config):
    with open(path, "w") as fh:
        for k in sorted(config):
            fh.write(f"{k}={config[k]}\n")


def read_manifest(path):
    """Parse a ``key=value`` manifest; unknown keys are rejected."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected key=value")
            k, v = (p.strip() for p in line.split("=", 1))
            if k not in MANIFEST_KEYS:
                raise ValidationError(f"{path}:{lineno}: unknown key {k!r}")
            out[k] = v
    return out
