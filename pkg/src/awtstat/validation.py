"""Monte Carlo validation experiments.

Each driver simulates an ensemble, compares it with the analytic
formulas and returns a :class:`Report` holding pass/fail checks and the
CSV rows the command line writes. The defaults are sized to run in
seconds: unit-variance white noise sampled at ``dt = 1`` and the Morse
wavelet ``lam^2 e^{-lam}`` at scale 8.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from . import bounds as B
from . import cov as C
from . import dist as D
from . import mc
from .spectral import WhiteBandlimited, compute_gamma
from .transform import TimeScaleGrid, awt_batch, log_scales
from .wavelets import Morse


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    kind: str
    header: tuple
    rows: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def check(self, name, passed, detail=""):
        self.checks.append(Check(name, bool(passed), detail))

    def failures(self):
        return [c for c in self.checks if not c.passed]


@dataclass(frozen=True)
class Setup:
    spec: object = Morse()
    F: object = WhiteBandlimited.for_sampling(1.0, 1.0)
    n_t: int = 256
    dt: float = 1.0
    scale: float = 8.0

    def grid(self, scales=None):
        sc = np.array([self.scale]) if scales is None else np.asarray(scales, dtype=float)
        return TimeScaleGrid(0.0, self.dt, self.n_t, sc)

    @property
    def t_mid(self):
        return self.dt * (self.n_t // 2)

    def gamma(self, points):
        return compute_gamma(self.F, self.spec, points).gamma


def tone_ensemble(q, n_paths, seed, setup=Setup(), threads=1):
    """Ensemble at one probe where the clean signal is a tone with SNR ``q``.

    The tone sits on the FFT bin closest to the wavelet peak frequency at
    the probe scale, so it is periodic on the window. Returns the ensemble,
    the realised SNR and the noise variance at the probe.
    """
    grid = setup.grid()
    probe = (setup.t_mid, setup.scale)
    g = setup.gamma([probe])[0, 0].real
    if q == 0:
        sig = None
    else:
        k = max(1, round(setup.spec.peak() / setup.scale * setup.n_t * setup.dt / (2 * math.pi)))
        omega = 2 * math.pi * k / (setup.n_t * setup.dt)
        amp = mc.tone_amplitude_for_snr(setup.spec, g, setup.scale, omega, q)
        sig = amp * np.cos(omega * grid.times)
    ens = mc.run_ensemble(sig, setup.F, setup.spec, grid, [probe], n_paths, seed, threads=threads)
    q_real = abs(ens.clean[0]) ** 2 / g
    return ens, q_real, g


def _fmt(v):
    return f"{v:.17g}" if isinstance(v, float) else str(v)


def validate_pdf_mag(qs=(0.0, 4.0, 25.0), n_paths=10_000, seed=1, setup=Setup(), threads=1):
    rep = Report("pdf-mag", ("x1", "x2", "analytic", "empirical", "abs_err"))
    line = mc.ks_line(n_paths)
    for j, q in enumerate(qs):
        ens, q_real, g = tone_ensemble(q, n_paths, seed + j, setup, threads)
        r = ens.magnitudes()[:, 0]
        m = abs(ens.clean[0])
        ks = mc.ks_against(mc.rice_cdf(m, g / 2), r)
        rep.check(f"KS magnitude q={q_real:.4g}", ks < line, f"KS={ks:.5f} line={line:.5f}")
        mass, edges = mc.magnitude_histogram(r)
        centres = 0.5 * (edges[1:] + edges[:-1])
        dens = mass / np.diff(edges)
        ana = D.rice_pdf(centres, m, g / 2)
        rep.rows += [(float(x), float(q_real), float(a), float(e), float(abs(a - e)))
                     for x, a, e in zip(centres, ana, dens)]
    return rep


def phase_normalization_error(q, nodes=64):
    """``|int_0^{2 pi} p(theta) d theta - 1|`` by the periodic trapezoid rule."""
    th = 2 * math.pi * np.arange(nodes) / nodes
    return abs(np.sum(D.phase_marginal_pdf(th, q)) * 2 * math.pi / nodes - 1.0)


def validate_pdf_phase(qs=(0.0, 2.0, 10.0), n_paths=10_000, seed=2, setup=Setup(), threads=1,
                       bins=64):
    rep = Report("pdf-phase", ("x1", "x2", "analytic", "empirical", "abs_err"))
    line = mc.ks_line(n_paths)
    width = 2 * math.pi / bins
    for j, q in enumerate(qs):
        ens, q_real, _ = tone_ensemble(q, n_paths, seed + j, setup, threads)
        th = ens.phases()[:, 0]
        thf = float(np.mod(np.angle(ens.clean[0]), 2 * math.pi)) if q > 0 else 0.0
        ks = mc.ks_against(mc.phase_cdf(q_real, thf), th)
        rep.check(f"KS phase q={q_real:.4g}", ks < line, f"KS={ks:.5f} line={line:.5f}")
        err = phase_normalization_error(q_real)
        rep.check(f"phase pdf normalization q={q_real:.4g}", err < 1e-10, f"err={err:.3g}")
        mass, edges = mc.phase_histogram(th, bins)
        centres = 0.5 * (edges[1:] + edges[:-1])
        if q > 0:
            k = int(np.argmax(mass))
            kf = int(thf // width)
            off = min((k - kf) % bins, (kf - k) % bins)
            rep.check(f"phase histogram mode q={q_real:.4g}", off <= 2, f"bin offset {off}")
        ana = D.phase_marginal_pdf(centres, q_real, thf)
        dens = mass / width
        rep.rows += [(float(x), float(q_real), float(a), float(e), float(abs(a - e)))
                     for x, a, e in zip(centres, ana, dens)]
    return rep


def validate_pdf_joint(n_paths=10_000, seed=3, setup=Setup(), threads=1, bins=12, lag=4):
    """Null two-point magnitude histogram against the closed-form density.

    Each bin's analytic mass comes from tensor Gauss-Legendre quadrature;
    a bin fails when it differs from the empirical mass by more than five
    binomial standard errors. Bins expecting fewer than 5 counts are
    written out but not tested, as the normal approximation fails there.
    """
    rep = Report("pdf-joint", ("x1", "x2", "analytic", "empirical", "abs_err"))
    probes = [(setup.t_mid, setup.scale), (setup.t_mid + lag * setup.dt, setup.scale)]
    ens = mc.run_ensemble(None, setup.F, setup.spec, setup.grid(), probes, n_paths, seed,
                          threads=threads)
    g = setup.gamma(probes)
    r = ens.magnitudes()
    hi = [3.2 * math.sqrt(g[i, i].real) for i in (0, 1)]
    e1 = np.linspace(0, hi[0], bins + 1)
    e2 = np.linspace(0, hi[1], bins + 1)
    counts, _, _ = np.histogram2d(r[:, 0], r[:, 1], bins=[e1, e2])
    emp = counts / n_paths
    x, w = np.polynomial.legendre.leggauss(12)
    worst = 0.0
    for i in range(bins):
        a1 = 0.5 * (e1[i + 1] - e1[i]) * (x + 1) + e1[i]
        for j in range(bins):
            a2 = 0.5 * (e2[j + 1] - e2[j]) * (x + 1) + e2[j]
            R1, R2 = np.meshgrid(a1, a2, indexing="ij")
            mass = float(np.sum(np.outer(w, w) * D.mag_joint_pdf_null_n2(R1, R2, g))
                         * 0.25 * (e1[i + 1] - e1[i]) * (e2[j + 1] - e2[j]))
            if mass * n_paths >= 5:
                se = math.sqrt(mass * (1 - mass) / n_paths)
                worst = max(worst, abs(emp[i, j] - mass) / se)
            rep.rows.append((float(0.5 * (e1[i] + e1[i + 1])), float(0.5 * (e2[j] + e2[j + 1])),
                             mass, float(emp[i, j]), float(abs(mass - emp[i, j]))))
    rep.check("2-D magnitude histogram", worst <= 5.0, f"max |z| = {worst:.3f}")
    return rep


def lag_for_corr2(rho2, s, alpha):
    """Time lag at equal scales giving ``|rho|^2 = rho2`` for the Morse
    wavelet ``lam^alpha e^{-lam}`` and white noise."""
    return 2 * s * math.sqrt(rho2 ** (-1.0 / (2 * alpha + 1)) - 1)


def _cov_row(rep, name, analytic, est, zmax=4.0):
    z = est.z(analytic)
    rep.rows.append((name, float(analytic), float(est.value), float(est.stderr), float(z)))
    rep.check(name, abs(z) <= zmax, f"z={z:.3f}")


def _pair_probes(setup, rho2):
    lag = lag_for_corr2(rho2, setup.scale, setup.spec.beta1)
    k = max(1, round(lag / setup.dt))
    return [(setup.t_mid, setup.scale), (setup.t_mid + k * setup.dt, setup.scale)]


def validate_cov_mag(rho2s=(0.1, 0.5), n_paths=10_000, seed=4, setup=Setup(), threads=1):
    rep = Report("cov-mag", ("quantity", "analytic", "empirical", "mc_stderr", "z_score"))
    for j, rho2 in enumerate(rho2s):
        probes = _pair_probes(setup, rho2)
        g = setup.gamma(probes)
        ens = mc.run_ensemble(None, setup.F, setup.spec, setup.grid(), probes, n_paths,
                              seed + j, threads=threads)
        a = ens.magnitudes()
        x = abs(g[0, 1]) ** 2 / (g[0, 0] * g[1, 1]).real
        if j == 0:
            _cov_row(rep, "mean_abs", C.mean_abs_null(g[0, 0].real), mc.empirical_mean(a[:, 0]))
            _cov_row(rep, "var_abs", C.var_abs_null(g[0, 0].real), mc.empirical_var(a[:, 0]))
        _cov_row(rep, f"corr_abs rho2={x:.4f}", C.corr_magnitudes_null(g),
                 mc.empirical_corr(a[:, 0], a[:, 1]))
        _cov_row(rep, f"cov_sq_abs rho2={x:.4f}",
                 C.cov_sq_magnitudes(probes[0], probes[1], setup.F, setup.spec),
                 mc.empirical_cov(a[:, 0] ** 2, a[:, 1] ** 2))
    return rep


def validate_cov_phase(rho2s=(0.1, 0.5), n_paths=10_000, seed=5, setup=Setup(), threads=1):
    rep = Report("cov-phase", ("quantity", "analytic", "empirical", "mc_stderr", "z_score"))
    for j, rho2 in enumerate(rho2s):
        probes = _pair_probes(setup, rho2)
        g = setup.gamma(probes)
        ens = mc.run_ensemble(None, setup.F, setup.spec, setup.grid(), probes, n_paths,
                              seed + j, threads=threads)
        th = ens.phases()
        x = abs(g[0, 1]) ** 2 / (g[0, 0] * g[1, 1]).real
        diff, summ = C.circular_cov_phases_null(g, with_sum=True)
        _, re, im = mc.empirical_circular_cov(th[:, 0], th[:, 1])
        _cov_row(rep, f"circ_cov_re rho2={x:.4f}", diff.real, re)
        _cov_row(rep, f"circ_cov_im rho2={x:.4f}", diff.imag, im)
        _, sre, sim = mc.empirical_circular_cov(th[:, 0], -th[:, 1])
        _cov_row(rep, f"circ_sum_re rho2={x:.4f}", summ.real, sre)
        _cov_row(rep, f"circ_sum_im rho2={x:.4f}", summ.imag, sim)
        _cov_row(rep, f"phase_cov rho2={x:.4f}", C.phase_cov_null_quadrature(g),
                 mc.empirical_cov(th[:, 0], th[:, 1]))
    return rep


def repetition_seed(seed, rep):
    return int(np.random.SeedSequence((seed, rep)).generate_state(1, np.uint64)[0])


def validate_independence(reps=100, n_paths=10_000, seed=6, lag=3, min_pass=0.97, threads=1,
                          setup=Setup(n_t=128, scale=4.0)):
    """Chi-square independence of ``|W(p1)|`` and ``Theta(p2)`` repeated
    over seeded null ensembles; passes when at least ``min_pass`` of the
    repetitions do not reject at the 1% level."""
    rep = Report("independence", ("rep", "statistic", "pvalue", "dof"))
    probes = [(setup.t_mid, setup.scale), (setup.t_mid + lag * setup.dt, setup.scale)]
    ok = 0
    for r in range(reps):
        ens = mc.run_ensemble(None, setup.F, setup.spec, setup.grid(), probes, n_paths,
                              repetition_seed(seed, r), threads=threads)
        res = mc.independence_test(ens.magnitudes()[:, 0], ens.phases()[:, 1])
        ok += res.pvalue >= 0.01
        rep.rows.append((r, res.statistic, res.pvalue, res.dof))
    rep.check("non-rejection rate", ok >= math.ceil(min_pass * reps), f"{ok}/{reps} at level 0.01")
    return rep


BOUND_HEADER = B.BOUND_CSV_HEADER
EPS_GRID = (0.05, 0.1, 0.25, 0.5, 1.0)
Q_GRID = (4.0, 16.0, 64.0)


def validate_bounds(qs=Q_GRID, eps_grid=EPS_GRID, n_paths=10_000, seed=7, setup=Setup(),
                    threads=1, kinds=("magnitude", "phase")):
    """Concentration bounds against event frequencies of tone ensembles.

    Magnitude and cosine-convention phase rows are asserted; arc-convention
    phase rows are reported only.
    """
    rep = Report("bounds", BOUND_HEADER)
    reports = []
    for j, q in enumerate(qs):
        ens, q_real, _ = tone_ensemble(q, n_paths, seed + j, setup, threads)
        w = ens.samples[:, 0]
        wf = ens.clean[0]
        for eps in eps_grid:
            if "magnitude" in kinds:
                f = mc.event_frequency(np.abs(np.abs(w) / abs(wf) - 1) > eps)
                b = B.magnitude_concentration_bound(q_real, eps)
                reports.append(B.BoundReport("magnitude", eps, (q_real,), b, None, f.value, f.n))
                rep.check(f"magnitude q={q_real:.4g} eps={eps}", mc.bound_holds(f.k, f.n, b),
                          f"freq={f.value:.4f} [{f.lower:.4f},{f.upper:.4f}] bound={b:.4f}")
            if "phase" in kinds and eps < math.pi / 2:
                b = B.phase_concentration_bound(q_real, eps)
                for conv in B.PHASE_CONVENTIONS:
                    ev = B.phase_deviation_event(np.angle(w), np.angle(wf), eps, conv)
                    f = mc.event_frequency(ev)
                    reports.append(B.BoundReport(f"phase-{conv}", eps, (q_real,), b, None,
                                                 f.value, f.n))
                    detail = f"freq={f.value:.4f} [{f.lower:.4f},{f.upper:.4f}] bound={b:.4f}"
                    if conv == "cosine":
                        rep.check(f"phase q={q_real:.4g} eps={eps}",
                                  mc.bound_holds(f.k, f.n, b), detail)
    rep.rows = reports
    return rep


@dataclass(frozen=True)
class ChirpSetup:
    """Linear chirp ``cos(2 pi t^2 / 2)`` sampled at ``fs`` over ``duration``
    seconds (instantaneous frequency ``t`` Hz), plus white noise."""

    fs: float = 200.0
    duration: float = 10.0
    noise_var: float = 1.0
    amplitude: float = 2.5
    spec: object = Morse()
    n_scales: int = 64
    s_min: float = 0.05
    s_max: float = 2.0

    @property
    def n_t(self):
        return int(round(self.fs * self.duration))

    @property
    def dt(self):
        return 1.0 / self.fs

    def grid(self):
        return TimeScaleGrid(0.0, self.dt, self.n_t, log_scales(self.s_min, self.s_max, self.n_scales))

    def signal(self):
        t = np.arange(self.n_t) * self.dt
        return self.amplitude * np.cos(2 * math.pi * 0.5 * t * t)

    @property
    def F(self):
        return WhiteBandlimited.for_sampling(self.noise_var, self.dt)


def chirp(fs=200.0, duration=10.0, amplitude=1.0):
    t = np.arange(int(round(fs * duration))) / fs
    return t, amplitude * np.cos(math.pi * t * t)


def validate_ridge(deltas=(0.0, 0.2), offsets=(1, 3, 12), t_probe=5.0, n_paths=10_000, seed=8,
                   setup=ChirpSetup(), threads=1):
    """Ridge misidentification frequency on a noisy chirp at ``t_probe``
    against the bound, for competing scales ``offsets`` grid steps above
    the clean ridge."""
    from .geometry import extract_ridge

    grid = setup.grid()
    clean = awt_batch(setup.signal(), grid.dt, setup.spec, grid.scales)
    ridge = extract_ridge(np.abs(clean), grid)
    it = grid.time_index(t_probe)
    k0 = int(ridge.index[it])
    ks = [k0 + o for o in offsets]
    if max(ks) >= grid.scales.size:
        raise ValueError("competing scale beyond the grid")
    probes = [(t_probe, grid.scales[k0])] + [(t_probe, grid.scales[k]) for k in ks]
    ens = mc.run_ensemble(setup.signal(), setup.F, setup.spec, grid, probes, n_paths, seed,
                          threads=threads)
    gdiag = [compute_gamma(setup.F, setup.spec, [p]).gamma[0, 0].real for p in probes]
    q = [abs(w) ** 2 / g for w, g in zip(ens.clean, gdiag)]
    rep = Report("ridge", BOUND_HEADER)
    reports = []
    for delta in deltas:
        freqs = mc.ridge_misid_frequency(ens, delta, [(0, j) for j in range(1, len(probes))])
        for j, f in enumerate(freqs, start=1):
            eps = B.ridge_epsilon(abs(ens.clean[0]), abs(ens.clean[j]), delta)
            b = B.ridge_misid_bound(q[0], q[j], eps)
            reports.append(B.BoundReport("ridge", eps, (q[0], q[j]), b, delta, f.value, f.n))
            rep.check(f"ridge delta={delta} s={probes[j][1]:.4g}", mc.bound_holds(f.k, f.n, b),
                      f"freq={f.value:.4f} bound={b:.4f}")
    rep.rows = reports
    rep.ridge_scale = probes[0][1]
    return rep


KINDS = {
    "pdf-mag": validate_pdf_mag,
    "pdf-phase": validate_pdf_phase,
    "pdf-joint": validate_pdf_joint,
    "cov-mag": validate_cov_mag,
    "cov-phase": validate_cov_phase,
    "independence": validate_independence,
    "bounds": validate_bounds,
    "ridge": validate_ridge,
}
