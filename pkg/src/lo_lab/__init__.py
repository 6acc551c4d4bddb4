"""Exact and Fourier-analytic tools for the concentration of signed integer sums."""

from .dist import StepSet, erdos_bound, exact_distribution, monte_carlo_rho, rho, rho_at
from .errors import CapacityError, InvariantViolation, LabError, NotApplicable, ValidationError

__all__ = [
    "StepSet",
    "erdos_bound",
    "exact_distribution",
    "monte_carlo_rho",
    "rho",
    "rho_at",
    "CapacityError",
    "InvariantViolation",
    "LabError",
    "NotApplicable",
    "ValidationError",
]

__version__ = "0.1.0"
