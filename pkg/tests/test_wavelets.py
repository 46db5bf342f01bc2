import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from awtstat.errors import DomainError, ValidationError
from awtstat.wavelets import (Custom, Klauder, Morse, decay_report, eval_psi_hat,
                              load_custom_csv, numeric_peak)


@given(st.floats(1, 12), st.floats(0.3, 4))
@settings(max_examples=60, deadline=None)
def test_morse_peak_matches_numeric(b1, b2):
    w = Morse(b1, b2)
    assert numeric_peak(w) == pytest.approx(w.peak(), rel=1e-6)


def test_morse_values():
    w = Morse(2, 1)
    lam = np.array([-1.0, 0.0, 0.5, 3.0])
    np.testing.assert_allclose(w.psi_hat(lam), [0, 0, 0.25 * math.exp(-0.5), 9 * math.exp(-3)])
    assert eval_psi_hat(w, 2.0) == pytest.approx(4 * math.exp(-2))
    assert w.center_frequency() == pytest.approx(1 / math.pi)


def test_morse_time_domain_oracle():
    # Morse(2, 1): psi(u) = (1/2pi) int psi_hat(l) e^{ilu} dl = 1 / (pi (1 - iu)^3)
    w = Morse(2, 1)
    for u in (0.0, 0.7, -2.0):
        re, _ = integrate.quad(lambda l: w.psi_hat(np.array([l]))[0].real, 0, 80, weight="cos", wvar=u)
        im, _ = integrate.quad(lambda l: w.psi_hat(np.array([l]))[0].real, 0, 80, weight="sin", wvar=u)
        assert complex(re, im) / (2 * math.pi) == pytest.approx(1 / (math.pi * (1 - 1j * u) ** 3), abs=1e-10)


@given(st.floats(1, 10), st.floats(0.5, 3))
@settings(max_examples=40, deadline=None)
def test_unit_peak(b1, b2):
    w = Morse(b1, b2, unit_peak=True)
    assert abs(w.psi_hat(np.array([w.peak()]))[0]) == pytest.approx(1.0, rel=1e-12)


def test_morse_validation():
    with pytest.raises(ValidationError):
        Morse(0.5, 1)
    with pytest.raises(ValidationError):
        Morse(2, 0)
    with pytest.raises(DomainError):
        Morse().psi_hat(np.array([np.nan]))


def test_klauder():
    w = Klauder(alpha=3, beta=0.5, gamma=2.0)
    assert w.peak() == pytest.approx(1.5)
    assert numeric_peak(w) == pytest.approx(1.5, rel=1e-6)
    lam = 2.0
    expect = lam ** 3 * math.exp(-4) * np.exp(0.5j * math.log(lam))
    assert eval_psi_hat(w, lam) == pytest.approx(expect)
    assert eval_psi_hat(w, -1.0) == 0
    with pytest.raises(ValidationError):
        Klauder(alpha=0.5)


def test_support_brackets_threshold():
    w = Morse(3, 2)
    lo, hi = w.support(1e-20)
    peak2 = abs(eval_psi_hat(w, w.peak())) ** 2
    assert abs(eval_psi_hat(w, lo)) ** 2 == pytest.approx(1e-20 * peak2, rel=1e-6)
    assert abs(eval_psi_hat(w, hi)) ** 2 == pytest.approx(1e-20 * peak2, rel=1e-6)


def _table(n=40):
    lam = np.linspace(0.1, 6, n)
    return lam, lam ** 2 * np.exp(-lam)


def test_custom_interpolates_and_is_zero_outside():
    lam, v = _table()
    w = Custom(lam, v)
    assert w.analytic
    np.testing.assert_allclose(w.psi_hat(lam), v)
    assert eval_psi_hat(w, 10.0) == 0 and eval_psi_hat(w, 0.05) == 0
    mid = 0.5 * (lam[3] + lam[4])
    assert eval_psi_hat(w, mid) == pytest.approx(0.5 * (v[3] + v[4]))
    assert w.peak() == pytest.approx(lam[np.argmax(v)])
    assert w.support() == (lam[0], lam[-1])


def test_custom_negative_half_is_not_analytic():
    lam, v = _table()
    w = Custom(lam, v, negative=0.1 * v)
    assert not w.analytic
    assert eval_psi_hat(w, -lam[5]) == pytest.approx(0.1 * v[5])


@pytest.mark.parametrize("mutate", [
    lambda l, v: (l[:10], v[:10]),
    lambda l, v: (l[::-1], v),
    lambda l, v: (l - 1, v),
    lambda l, v: (l, np.where(np.arange(l.size) == 30, 5.0, v)),
    lambda l, v: (l, np.where(np.arange(l.size) == 3, np.nan, v)),
])
def test_custom_rejects_bad_tables(mutate):
    lam, v = _table()
    with pytest.raises(ValidationError):
        Custom(*mutate(lam, v))


def test_load_custom_csv(tmp_path):
    lam, v = _table()
    p = tmp_path / "w.csv"
    p.write_text("lambda,re,im\n" + "".join(f"{a:.17g},{b:.17g},0\n" for a, b in zip(lam, v)))
    w = load_custom_csv(p)
    np.testing.assert_allclose(w.psi_hat(lam), v)
    bad = tmp_path / "bad.csv"
    bad.write_text("lambda,re,im\n1,2,x\n")
    with pytest.raises(ValidationError, match=":2:"):
        load_custom_csv(bad)
    with pytest.raises(ValidationError):
        (tmp_path / "h.csv").write_text("freq,re,im\n")
        load_custom_csv(tmp_path / "h.csv")


def test_decay_report_morse_finite():
    rep = decay_report(Morse(3, 1), np.geomspace(1e-4, 1e3, 600))
    assert rep.all_finite
    # sup over l > 0 of |l psi_hat| for l^3 e^-l is attained at l = 4
    assert rep.suprema["D0_1"] == pytest.approx(4 ** 4 * math.exp(-4), rel=1e-3)


class _SlowDecay:
    analytic = True

    def psi_hat(self, lam):
        lam = np.asarray(lam, dtype=float)
        return np.where(lam > 0, 1 / np.sqrt(1 + np.abs(lam)), 0.0) + 0j


def test_decay_report_flags_growth():
    rep = decay_report(_SlowDecay(), np.geomspace(1e-3, 1e4, 400))
    assert not rep.finite["D0_1"]
    assert not rep.all_finite
    with pytest.raises(ValidationError):
        decay_report(Morse(), np.linspace(1, 2, 5))
