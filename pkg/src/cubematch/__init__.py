"""Exact Wasserstein-1 distances, bounds and Monte Carlo checks on the Boolean cube."""

__version__ = "0.1.0"

from .cube import (CubePoint, DenseMeasure, EmpiricalMeasure, ball_points, ball_size, empirical_measure,
                   entropy, entropy_inverse, hamming, log_binomial, sample_uniform)
from .errors import InvalidInputError, ResourceError
from .fourier import (CubeFunction, SpectralVector, diffuse_ball, diffuse_epsilon, diffuse_epsilon_direct,
                      influence, lipschitz_check, measure_coefficients, wht)
from .transport import (TransportSolution, dual_lower_bound, total_variation, verify_plan, wasserstein_exact,
                        wasserstein_ssp, wasserstein_value)

__all__ = [
    "CubePoint", "DenseMeasure", "EmpiricalMeasure", "ball_points", "ball_size", "empirical_measure",
    "entropy", "entropy_inverse", "hamming", "log_binomial", "sample_uniform", "InvalidInputError",
    "ResourceError", "CubeFunction", "SpectralVector", "diffuse_ball", "diffuse_epsilon",
    "diffuse_epsilon_direct", "influence", "lipschitz_check", "measure_coefficients", "wht",
    "TransportSolution", "dual_lower_bound", "total_variation", "verify_plan", "wasserstein_exact",
    "wasserstein_ssp", "wasserstein_value",
]
