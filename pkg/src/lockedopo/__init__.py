"""Quantum noise of a self-phase-locked type-II OPO above threshold."""

from .criteria import CriteriaReport, report
from .fluctuations import (
    CovarianceMatrix,
    build_system,
    output_covariance,
    point_covariances,
    transfer_matrix,
)
from .model import OperatingPoint, SteadyState, min_threshold_point, steady_state

__all__ = [
    "CovarianceMatrix",
    "CriteriaReport",
    "OperatingPoint",
    "SteadyState",
    "build_system",
    "min_threshold_point",
    "output_covariance",
    "point_covariances",
    "report",
    "steady_state",
    "transfer_matrix",
]
