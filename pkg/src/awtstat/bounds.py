"""Concentration and ridge-misidentification bounds.

The bound functions are evaluated exactly as stated; values above 1 are
valid but vacuous and are flagged in :class:`BoundReport`. Exact
probabilities of the bounded events (from the Rice and phase marginal
densities) are provided for comparison.
"""
from dataclasses import dataclass, field
import csv
import math

import numpy as np

from .dist import magnitude_ratio_pdf, phase_marginal_pdf
from .errors import DomainError, InapplicableBoundError

PHASE_CONVENTIONS = ("cosine", "arc")


@dataclass
class BoundReport:
    kind: str
    epsilon: float
    q_values: tuple
    bound: float
    delta: float = None
    empirical: float = None
    n_paths: int = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.bound >= 0:
            raise DomainError("bound must be nonnegative")
        if self.empirical is not None and not 0 <= self.empirical <= 1:
            raise DomainError("empirical frequency must lie in [0, 1]")

    @property
    def vacuous(self):
        return self.bound >= 1.0


def _check_q(*qs):
    for q in qs:
        if not q >= 0:
            raise DomainError("SNR must be nonnegative")


def magnitude_concentration_bound(q, eps):
    """Bound on ``P(| |W_Y| / |W_f| - 1 | > eps)``:
    ``exp(-eps^2 q / 16) + exp(-eps q / 2)``."""
    _check_q(q)
    if not eps > 0:
        raise DomainError("eps must be positive")
    return math.exp(-eps * eps * q / 16.0) + math.exp(-eps * q / 2.0)


def ridge_epsilon(Wf_ridge, Wf_other, delta):
    """``(|W_f(s_f)| - (1 - delta)|W_f(s)|) / (|W_f(s_f)| + (1 - delta)|W_f(s)|)``."""
    if not Wf_ridge > 0 or Wf_other < 0:
        raise DomainError("need Wf_ridge > 0 and Wf_other >= 0")
    if not 0 <= delta < 1:
        raise DomainError("delta must lie in [0, 1)")
    b = (1.0 - delta) * Wf_other
    eps = (Wf_ridge - b) / (Wf_ridge + b)
    if not eps > 0:
        raise InapplicableBoundError(
            f"eps = {eps:.3g} <= 0: the competing scale is at least as strong as the ridge")
    return eps


def ridge_misid_bound(q_ridge, q_other, eps):
    """Bound on ``P(|W_Y(t, s_f)| < (1 - delta)|W_Y(t, s)|)`` with ``eps`` from
    :func:`ridge_epsilon`: the sum of the magnitude bounds at both scales."""
    _check_q(q_ridge, q_other)
    if not 0 < eps <= 1:
        raise DomainError("eps must lie in (0, 1]")
    return magnitude_concentration_bound(q_ridge, eps) + magnitude_concentration_bound(q_other, eps)


def phase_concentration_bound(q, eps):
    """``(eps/pi) e^{-q} + (2 eps sqrt(q) / sqrt(pi)) cos(eps) exp(-q (1 - cos^2 eps))``."""
    _check_q(q)
    if not 0 < eps < math.pi / 2:
        raise DomainError("eps must lie in (0, pi/2)")
    return (eps / math.pi * math.exp(-q)
            + 2 * eps * math.sqrt(q) / math.sqrt(math.pi) * math.cos(eps)
            * math.exp(-q * (1 - math.cos(eps) ** 2)))


def _gl(f, a, b, n=400):
    x, w = np.polynomial.legendre.leggauss(n)
    h = 0.5 * (b - a)
    return float(h * np.sum(w * f(h * (x + 1) + a)))


def magnitude_deviation_probability(q, eps):
    """Exact ``P(| |W_Y| / |W_f| - 1 | > eps)`` at SNR ``q > 0``."""
    if not q > 0:
        raise DomainError("the ratio needs q > 0")
    lo, hi = max(0.0, 1 - eps), 1 + eps
    inside = _gl(lambda r: magnitude_ratio_pdf(r, q), lo, hi)
    return min(1.0, max(0.0, 1.0 - inside))


def phase_deviation_event(theta, theta_f, eps, convention="cosine"):
    """Indicator of a phase deviating from ``theta_f`` by more than ``eps``.

    ``cosine``: ``1 - |cos(theta - theta_f)| > eps``. ``arc``: wrapped
    angular distance ``> eps``.
    """
    u = np.asarray(theta, dtype=float) - theta_f
    if convention == "cosine":
        return 1.0 - np.abs(np.cos(u)) > eps
    if convention == "arc":
        return np.abs(np.angle(np.exp(1j * u))) > eps
    raise DomainError(f"unknown phase convention {convention!r}")


def phase_deviation_probability(q, eps, convention="cosine"):
    """Exact probability of :func:`phase_deviation_event` at SNR ``q``."""
    pdf = lambda u: phase_marginal_pdf(u, q)  # noqa: E731
    if convention == "cosine":
        if eps >= 1:
            return 0.0
        a = math.acos(1 - eps)
        return _gl(pdf, a, math.pi - a) + _gl(pdf, math.pi + a, 2 * math.pi - a)
    if convention == "arc":
        return _gl(pdf, eps, 2 * math.pi - eps) if eps < math.pi else 0.0
    raise DomainError(f"unknown phase convention {convention!r}")


BOUND_CSV_HEADER = ("kind", "eps", "delta", "q1", "q2", "bound", "empirical", "n")


def _fmt(v):
    if v is None:
        return ""
    return f"{v:.17g}" if isinstance(v, float) else str(v)


def write_bounds_csv(path, reports, header_lines=()):
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(BOUND_CSV_HEADER)
        for r in reports:
            q = tuple(r.q_values) + (None,)
            w.writerow([r.kind, _fmt(float(r.epsilon)), _fmt(r.delta), _fmt(float(q[0])),
                        _fmt(None if q[1] is None else float(q[1])), _fmt(float(r.bound)),
                        _fmt(r.empirical), _fmt(r.n_paths)])
