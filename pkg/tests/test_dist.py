import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from awtstat.dist import (J_closed_n2, PointContext, log_J, mag_joint_pdf_n2,
                          mag_joint_pdf_null_general, mag_joint_pdf_null_n2,
                          mag_joint_pdf_null_n2_laguerre, mag_phase_joint_pdf,
                          magnitude_ratio_pdf, nonnull_joint_phase_pdf,
                          phase_joint_pdf_null_general, phase_joint_pdf_null_n2,
                          phase_marginal_pdf, rice_pdf, wy_pdf)
from awtstat.errors import DegenerateError, DomainError, NumericError, UnsupportedError

G2 = np.array([[1.3, 0.5 + 0.4j], [0.5 - 0.4j, 0.9]])


def trap_torus(f, n=64):
    th = 2 * math.pi * np.arange(n) / n
    return sum(f(a, b) for a in th for b in th) * (2 * math.pi / n) ** 2


@pytest.mark.parametrize("m,s2", [(0.0, 1.0), (1.5, 0.4), (30.0, 2.0)])
def test_rice_vs_scipy(m, s2):
    r = np.linspace(0.01, m + 10 * math.sqrt(s2), 50)
    ref = stats.rice.pdf(r, m / math.sqrt(s2), scale=math.sqrt(s2))
    np.testing.assert_allclose(rice_pdf(r, m, s2), ref, rtol=1e-10, atol=1e-300)


def test_rice_large_snr_no_overflow():
    v = rice_pdf(np.array([1e4 - 1, 1e4, 1e4 + 1]), 1e4, 1.0)
    assert np.all(np.isfinite(v)) and v[1] == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-4)
    assert rice_pdf(-1.0, 1.0, 1.0) == 0.0
    with pytest.raises(DomainError):
        rice_pdf(1.0, 1.0, 0.0)


@given(st.floats(0.05, 200))
@settings(max_examples=30, deadline=None)
def test_ratio_pdf_normalized_and_rice_consistent(q):
    total, _ = integrate.quad(lambda r: magnitude_ratio_pdf(r, q), 0, 1 + 12 / math.sqrt(q), points=[1.0],
                              limit=200)
    assert total == pytest.approx(1.0, abs=1e-7)
    # |W_f| = 1, G = 1/q; ratio density is the Rice density of |W_Y|
    r = 0.8
    assert magnitude_ratio_pdf(r, q) == pytest.approx(rice_pdf(r, 1.0, 0.5 / q), rel=1e-10)


def test_ratio_pdf_zero_snr():
    assert magnitude_ratio_pdf(1.0, 0.0) == 0.0
    with pytest.raises(DomainError):
        magnitude_ratio_pdf(1.0, -1.0)


def test_null_n2_three_routes():
    for r1, r2 in [(0.3, 0.4), (1.0, 1.2), (2.5, 0.7)]:
        a = mag_joint_pdf_null_n2(r1, r2, G2)
        assert mag_joint_pdf_null_n2_laguerre(r1, r2, G2, terms=120) == pytest.approx(a, rel=1e-9)
        assert mag_joint_pdf_null_general([r1, r2], G2) == pytest.approx(a, rel=1e-9)


def test_null_n2_normalized():
    total, _ = integrate.dblquad(lambda y, x: mag_joint_pdf_null_n2(x, y, G2), 0, 8, 0, 8,
                                 epsabs=1e-10)
    assert total == pytest.approx(1.0, abs=1e-7)


def test_null_n2_independent_factorizes():
    g = np.diag([1.0, 2.0]).astype(complex)
    r1, r2 = 0.7, 1.9
    assert mag_joint_pdf_null_n2(r1, r2, g) == pytest.approx(
        rice_pdf(r1, 0, 0.5) * rice_pdf(r2, 0, 1.0), rel=1e-12)


def test_log_J_matches_closed_form():
    M = np.array([[0.7, 0.3 - 0.2j], [0.3 + 0.2j, 1.1]])
    assert math.exp(log_J(M)) == pytest.approx(J_closed_n2(M), rel=1e-12)


def test_null_general_n3_diagonal():
    g = np.diag([1.0, 0.5, 2.0]).astype(complex)
    r = [0.6, 0.9, 1.3]
    ref = rice_pdf(r[0], 0, 0.5) * rice_pdf(r[1], 0, 0.25) * rice_pdf(r[2], 0, 1.0)
    assert mag_joint_pdf_null_general(r, g) == pytest.approx(ref, rel=1e-10)
    with pytest.raises(UnsupportedError):
        mag_joint_pdf_null_general(np.ones(4), np.eye(4))


def _polar_oracle(r1, r2, ctx):
    return r1 * r2 * trap_torus(lambda a, b: wy_pdf([r1 * np.exp(1j * a), r2 * np.exp(1j * b)], ctx))


@pytest.mark.parametrize("wf", [[0, 0], [1.2 + 0.3j, -0.5 + 0.8j], [3.0, 2.0j]])
def test_nonnull_n2_vs_direct_polar_integral(wf):
    ctx = PointContext(np.array(wf), G2)
    for r1, r2 in [(0.5, 0.8), (1.4, 1.1), (3.0, 2.0)]:
        assert mag_joint_pdf_n2(r1, r2, ctx) == pytest.approx(_polar_oracle(r1, r2, ctx), rel=1e-6)


def test_nonnull_n2_marginal_is_rice():
    ctx = PointContext(np.array([1.0 + 1.0j, 0.5]), G2)
    r1 = 1.3
    m, _ = integrate.quad(lambda y: mag_joint_pdf_n2(r1, y, ctx), 0, 9, limit=200)
    assert m == pytest.approx(rice_pdf(r1, abs(ctx.W_f[0]), 0.65), rel=1e-6)
    assert mag_joint_pdf_n2(0.0, 1.0, ctx) == 0.0


def test_point_context_rejects_singular():
    with pytest.raises(NumericError):
        PointContext(np.zeros(2), np.array([[1, 1], [1, 1]]))
    with pytest.raises(DomainError):
        PointContext(np.zeros(3), np.eye(2))


@given(st.floats(0, 60), st.floats(-4, 4))
@settings(max_examples=40, deadline=None)
def test_phase_marginal_normalized(q, tf):
    total, _ = integrate.quad(lambda t: phase_marginal_pdf(t, q, tf), tf - math.pi, tf + math.pi,
                              points=[tf], limit=200)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_phase_marginal_vs_radial_integral():
    G = 0.8
    wf = 1.1 * np.exp(0.6j)
    ctx = PointContext(np.array([wf]), np.array([[G]]))
    q = abs(wf) ** 2 / G
    for th in (0.0, 0.6, 2.5, 4.0):
        ref, _ = integrate.quad(lambda r: mag_phase_joint_pdf(r, th, ctx), 0, 15)
        assert phase_marginal_pdf(th, q, 0.6) == pytest.approx(ref, rel=1e-9)
    assert phase_marginal_pdf(1.0, 0.0) == pytest.approx(1 / (2 * math.pi))


def test_phase_joint_n2_routes():
    for t1, t2 in [(0.1, 0.2), (1.0, 4.0), (5.5, 0.3)]:
        a = phase_joint_pdf_null_n2(t1, t2, G2)
        assert phase_joint_pdf_null_general([t1, t2], G2) == pytest.approx(a, rel=1e-9)
        ctx = PointContext(np.zeros(2), G2)
        ref, _ = integrate.dblquad(lambda y, x: x * y * wy_pdf([x * np.exp(1j * t1), y * np.exp(1j * t2)], ctx),
                                   0, 12, 0, 12, epsabs=1e-11)
        assert a == pytest.approx(ref, rel=1e-7)


@given(st.floats(0.05, 0.95), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
@settings(max_examples=40, deadline=None)
def test_phase_joint_n2_marginal_uniform(rho, arg, t1):
    g = np.array([[1.0, rho * np.exp(1j * arg)], [rho * np.exp(-1j * arg), 1.0]])
    m, _ = integrate.quad(lambda t2: phase_joint_pdf_null_n2(t1, t2, g), 0, 2 * math.pi, limit=200)
    assert m == pytest.approx(1 / (2 * math.pi), rel=1e-8)
    assert phase_joint_pdf_null_n2(t1, t1 + 0.7, g) == pytest.approx(phase_joint_pdf_null_n2(0, 0.7, g))


def test_phase_joint_n3():
    assert phase_joint_pdf_null_general([0.1, 2, 4], np.diag([1.0, 2.0, 0.5])) == pytest.approx(
        (2 * math.pi) ** -3, rel=1e-9)
    g = np.array([[1, 0.3, 0.1j], [0.3, 1, 0.2], [-0.1j, 0.2, 1]])
    total = 0.0
    n = 16
    th = 2 * math.pi * np.arange(n) / n
    for a in th:
        for b in th:
            total += phase_joint_pdf_null_general([0.0, a, b], g)
    assert total * (2 * math.pi / n) ** 2 == pytest.approx(1 / (2 * math.pi), rel=1e-4)


def test_phase_errors():
    with pytest.raises(DegenerateError):
        phase_joint_pdf_null_n2(0, 1, np.array([[1, 1], [1, 1]]))
    with pytest.raises(UnsupportedError):
        nonnull_joint_phase_pdf()
    with pytest.raises(DomainError):
        phase_marginal_pdf(0.0, -1.0)
