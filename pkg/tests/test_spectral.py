import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from awtstat.errors import DomainError, NumericError, UnsupportedError, ValidationError
from awtstat.spectral import (Density, WhiteBandlimited, WhiteImproper, compute_gamma,
                              covariance_from_spectrum, integrate_panels, load_density_csv,
                              pseudo_cov_norm, synthesize_paths)
from awtstat.wavelets import Custom, Morse


def test_integrate_panels_known():
    v, err = integrate_panels(lambda x: x ** 4 * np.exp(-2 * x), 1e-8, 60.0, rtol=1e-12)
    assert v == pytest.approx(0.75, rel=1e-11)
    with pytest.raises(NumericError):
        integrate_panels(lambda x: np.sin(1e5 * x) / x, 1e-3, 1.0, rtol=1e-12, max_levels=2)


def test_white_bandlimited_covariance():
    F = WhiteBandlimited.for_sampling(2.0, 0.5)
    assert covariance_from_spectrum(F, 0.0) == pytest.approx(2.0)
    # samples at integer multiples of dt are uncorrelated
    assert abs(covariance_from_spectrum(F, 1.5)) < 1e-14
    assert F.mass() == pytest.approx(2.0)


def test_density_covariance_vs_quad():
    lam = np.array([0.0, 0.5, 1.0, 2.0, 3.0])
    val = np.array([1.0, 2.0, 0.5, 0.25, 0.0])
    F = Density(lam, val)
    for t in (0.0, 0.3, 4.0, 17.0):
        ref, _ = integrate.quad(lambda x: F.density(x) * math.cos(t * x), 0, 3, points=lam[1:-1],
                                limit=400, epsabs=1e-13)
        assert covariance_from_spectrum(F, t) == pytest.approx(2 * ref, abs=1e-11)


def test_improper_measure_has_no_covariance():
    with pytest.raises(UnsupportedError):
        covariance_from_spectrum(WhiteImproper(), 0.0)
    with pytest.raises(UnsupportedError):
        synthesize_paths(WhiteImproper(), 16, 1.0, 1, 0)


def test_density_validation(tmp_path):
    with pytest.raises(ValidationError):
        Density([0, 1], [1, -1])
    with pytest.raises(ValidationError):
        Density([1, 0], [1, 1])
    p = tmp_path / "d.csv"
    p.write_text("lambda,density\n-1,2\n0,1\n1,2\n")
    F = load_density_csv(p)
    np.testing.assert_array_equal(F.lam, [0, 1])
    p.write_text("lambda,density\n-1,3\n0,1\n1,2\n")
    with pytest.raises(ValidationError, match="not even"):
        load_density_csv(p)


def test_synthesis_reproducible_and_batch_independent():
    F = WhiteBandlimited.for_sampling(1.0, 1.0)
    a = synthesize_paths(F, 64, 1.0, 10, seed=5)
    b = synthesize_paths(F, 64, 1.0, 4, seed=5, first=6)
    np.testing.assert_array_equal(a[6:], b)
    assert not np.allclose(a, synthesize_paths(F, 64, 1.0, 10, seed=6))


def test_synthesis_second_order():
    F = Density(np.array([0.0, 1.0, 2.0]), np.array([1.0, 0.5, 0.0]))
    n_t, dt = 128, 0.5
    x = synthesize_paths(F, n_t, dt, 4000, seed=1)
    c0 = covariance_from_spectrum(F, 0.0)
    c1 = covariance_from_spectrum(F, dt)
    emp0 = np.mean(x * x)
    emp1 = np.mean(x[:, 1:] * x[:, :-1])
    # 4000 x 128 samples, correlated; 3% is many standard errors
    assert emp0 == pytest.approx(c0, rel=0.03)
    assert emp1 == pytest.approx(c1, rel=0.05)


def test_synthesis_warns_beyond_nyquist():
    with pytest.warns(UserWarning, match="Nyquist"):
        synthesize_paths(WhiteBandlimited(10.0, 1.0), 16, 1.0, 1, 0)


def test_gamma_morse_white_closed_form():
    # Morse(2,1), unit white: Gamma(t1,s;t2,s) = 24 / (2 - i (t1 - t2)/s)^5
    s = 1.7
    pts = [(0.0, s), (0.4, s), (-3.0, s)]
    g = compute_gamma(WhiteImproper(1.0), Morse(2, 1), pts, rtol=1e-11)
    for i, (ti, _) in enumerate(pts):
        for j, (tj, _) in enumerate(pts):
            assert g.gamma[i, j] == pytest.approx(24 / (2 - 1j * (ti - tj) / s) ** 5, rel=1e-9)
    assert pseudo_cov_norm(g) == 0


def test_gamma_across_scales_closed_form():
    # s1, s2 at equal times: sqrt(s1 s2) int (s1 s2)^2 l^4 e^{-(s1+s2) l} dl
    s1, s2 = 0.5, 3.0
    g = compute_gamma(WhiteImproper(2.0), Morse(2, 1), [(0, s1), (0, s2)], rtol=1e-11)
    expect = 2.0 * math.sqrt(s1 * s2) * (s1 * s2) ** 2 * 24 / (s1 + s2) ** 5
    assert g.gamma[0, 1] == pytest.approx(expect, rel=1e-9)


@given(st.lists(st.tuples(st.floats(-20, 20), st.floats(0.3, 8)), min_size=2, max_size=5))
@settings(max_examples=30, deadline=None)
def test_gamma_hermitian_psd(points):
    g = compute_gamma(WhiteBandlimited.for_sampling(1, 1), Morse(3, 2), points)
    np.testing.assert_allclose(g.gamma, g.gamma.conj().T, atol=1e-14)
    d = g.gamma.diagonal().real
    assert np.linalg.eigvalsh(g.gamma).min() >= -1e-9 * d.sum()


def test_gamma_pseudo_for_non_analytic_wavelet():
    lam = np.linspace(0.05, 8, 200)
    pos = lam ** 2 * np.exp(-lam)
    neg = 0.3 * pos
    w = Custom(lam, pos, negative=neg)
    F = WhiteImproper(1.0)
    s = 1.0
    g = compute_gamma(F, w, [(0.0, s)], rtol=1e-10)
    # E[W W] = int conj(psi(l)) conj(psi(-l)) dl over both half lines
    ref, _ = integrate.quad(lambda x: 2 * np.interp(x, lam, pos) * np.interp(x, lam, neg),
                            lam[0], lam[-1], limit=1000, points=lam[1:-1])
    assert g.pseudo[0, 0].real == pytest.approx(ref, rel=1e-6)
    full, _ = integrate.quad(lambda x: np.interp(x, lam, pos) ** 2 + np.interp(x, lam, neg) ** 2,
                             lam[0], lam[-1], limit=1000, points=lam[1:-1])
    assert g.gamma[0, 0].real == pytest.approx(full, rel=1e-6)


def test_gamma_errors():
    with pytest.raises(DomainError):
        compute_gamma(WhiteImproper(), Morse(), [])
    with pytest.raises(DomainError):
        compute_gamma(WhiteImproper(), Morse(), [(0, -1)])


def test_gamma_csv(tmp_path):
    g = compute_gamma(WhiteImproper(), Morse(), [(0, 1), (1, 1)])
    g.write_csv(tmp_path / "g.csv")
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert lines[0] == "l,lp,re,im,pseudo_re,pseudo_im" and len(lines) == 5
    assert g.condition_number() >= 1 and 0 < g.rcond() <= 1
