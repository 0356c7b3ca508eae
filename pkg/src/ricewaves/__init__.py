"""Specular points, level curves and dislocations of stationary Gaussian surfaces."""

from .dislocations import DislocationModel, PairQuantities, correlation_A
from .field_functionals import Spec2DProblem, TwinkleMoments, m2_coefficient, sp2d_expectation, twinkle_rate
from .level_angle import GradientAnisotropy, length_intensity, palm_angle_density
from .spectral_model import (BumpConvolutionCovariance, DegenerateModelError, GaussianCovariance,
                             GaussianRingSpectrum, GaussianSpectrum2D, RingSpectrum, StretchedSpectrum2D,
                             TabulatedSpectrumCovariance)
from .specular1d import (SpecularConfig, sp1_exact_expectation, sp2_expectation, sp2_variance,
                         theta_coefficient)

__version__ = "0.1.0"

__all__ = [
    "BumpConvolutionCovariance", "DegenerateModelError", "DislocationModel", "GaussianCovariance",
    "GaussianRingSpectrum", "GaussianSpectrum2D", "GradientAnisotropy", "PairQuantities", "RingSpectrum",
    "Spec2DProblem", "SpecularConfig", "StretchedSpectrum2D", "TabulatedSpectrumCovariance", "TwinkleMoments",
    "correlation_A", "length_intensity", "m2_coefficient", "palm_angle_density", "sp1_exact_expectation",
    "sp2_expectation", "sp2_variance", "sp2d_expectation", "theta_coefficient", "twinkle_rate",
]
