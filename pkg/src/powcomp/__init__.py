"""Exact enumeration, truncated determinants and certified constants for
compositions of 1 into powers of an integer base."""

from __future__ import annotations

from .errors import (
    CertificationError,
    ComputationError,
    NewtonError,
    OracleScaleError,
    TailBoundError,
)
from .exact import brute_force_q, max_reps, param_distribution, q, q_values, w1_coeffs, weight_table, ws
from .interval import ComplexBox, Interval
from .series import BiSeries, Series, det_S, det_T, det_T_distinct, det_T_largest, implicit_root_u

__version__ = "0.1.0"

__all__ = [
    "BiSeries",
    "CertificationError",
    "ComplexBox",
    "ComputationError",
    "Interval",
    "NewtonError",
    "OracleScaleError",
    "Series",
    "TailBoundError",
    "brute_force_q",
    "det_S",
    "det_T",
    "det_T_distinct",
    "det_T_largest",
    "implicit_root_u",
    "max_reps",
    "param_distribution",
    "q",
    "q_values",
    "w1_coeffs",
    "weight_table",
    "ws",
]
