"""Analytic wavelet transform statistics.

Transform of sampled signals, second-order structure of wavelet
coefficients of stationary Gaussian noise, magnitude and phase
distributions, concentration bounds, scalogram geometry and Monte Carlo
validation.
"""
from ._backend import BACKEND
from .bounds import (BoundReport, magnitude_concentration_bound, phase_concentration_bound,
                     ridge_epsilon, ridge_misid_bound)
from .cov import (circular_cov_phases_null, corr_magnitudes_null, cov_magnitudes_general,
                  cov_magnitudes_null, cov_sq_magnitudes, morse_whitenoise_gamma_ratio,
                  phase_cov_asymptotic)
from .dist import (PointContext, mag_joint_pdf_n2, mag_joint_pdf_null_general,
                   mag_joint_pdf_null_n2, magnitude_ratio_pdf, phase_joint_pdf_null_general,
                   phase_joint_pdf_null_n2, phase_marginal_pdf, rice_pdf, wy_pdf)
from .errors import (AwtError, DegenerateError, DomainError, InapplicableBoundError,
                     NumericError, UnsupportedError, ValidationError)
from .geometry import ContourSet, RidgeCurve, extract_level_set, extract_ridge
from .spectral import (Density, GammaMatrix, WhiteBandlimited, WhiteImproper, compute_gamma,
                       synthesize_paths)
from .transform import (ComplexField, TimeScaleGrid, awt_batch, awt_forward, scale_to_frequency,
                        snr_field)
from .wavelets import Custom, Klauder, Morse

__version__ = "0.1.0"
