"""Finite-space solver for causal variational principles with external potentials."""
from .errors import CVPError
from .model import (
    InitialData,
    PointSpace,
    ProblemInstance,
    SolutionRecord,
    action_value,
    apriori_volume_bound,
    el_residuals,
    rescale,
    validate_lagrangian,
)

__version__ = "0.1.0"

__all__ = [
    "CVPError",
    "InitialData",
    "PointSpace",
    "ProblemInstance",
    "SolutionRecord",
    "action_value",
    "apriori_volume_bound",
    "el_residuals",
    "rescale",
    "validate_lagrangian",
]
