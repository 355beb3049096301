"""Indefinite-metric (Krein) state spaces for the free electromagnetic potential."""

from .borchers import AlgebraBasis, GnsSpace, WightmanFunctional, field_action, gns_construct
from .errors import IndefMetricError
from .fock import FieldOperator, FockSpace, MomentumLattice, build_fock, field_A, field_B, field_F
from .gupta_bleuler import certify, physical_quotient, physical_subspace
from .kernels import BACKEND
from .krein import (
    IndefiniteSpace,
    MetricOperator,
    Signature,
    build_space,
    krein_normalize,
    metric_operator,
    signature,
    strip_nulls,
)
from .testfunc import TestFunction, gaussian
from .twopoint import GaugeParameters, Quadrature, dplus, eplus, two_point_A, two_point_F

__version__ = "0.1.0"

__all__ = [
    "AlgebraBasis",
    "BACKEND",
    "FieldOperator",
    "FockSpace",
    "GaugeParameters",
    "GnsSpace",
    "IndefMetricError",
    "IndefiniteSpace",
    "MetricOperator",
    "MomentumLattice",
    "Quadrature",
    "Signature",
    "TestFunction",
    "WightmanFunctional",
    "build_fock",
    "build_space",
    "certify",
    "dplus",
    "eplus",
    "field_A",
    "field_B",
    "field_F",
    "field_action",
    "gaussian",
    "gns_construct",
    "krein_normalize",
    "metric_operator",
    "physical_quotient",
    "physical_subspace",
    "signature",
    "strip_nulls",
    "two_point_A",
    "two_point_F",
]
