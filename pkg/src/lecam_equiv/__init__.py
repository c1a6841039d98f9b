"""Constructive equivalence maps between Gaussian regression and white noise.

The package builds the explicit transformations that carry a nonparametric
regression sample into a Gaussian shift on an approximation space, evaluates
the resulting Le Cam distance bounds at finite sample size, and checks the
supporting technical statements by exact computation and seeded Monte Carlo.
"""

from lecam_equiv.errors import (
    DegenerateFilterError,
    DesignSizeError,
    InvalidDesignError,
    NonIsomorphicDesignError,
    OrderingViolationError,
    PreconditionError,
    RankDeficiencyError,
    EmptyBinError,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateFilterError",
    "DesignSizeError",
    "EmptyBinError",
    "InvalidDesignError",
    "NonIsomorphicDesignError",
    "OrderingViolationError",
    "PreconditionError",
    "RankDeficiencyError",
]
