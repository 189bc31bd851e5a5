"""Parallel mean curvature surfaces in CH^2 built from Jacobi elliptic functions."""
from .elliptic import DomainError, amplitude, complete_K, sn_cn_dn
from .surfaces import (
    BoundaryMinus,
    BoundaryPlus,
    GeneralHigh,
    GeneralLow,
    Hirakawa,
    SingularPoint,
    SurfaceParams,
    domain_halfwidth,
    frame_data,
    general,
    kaehler_angle,
)
from .verify import GridSpec, ResidualReport, verify_all

__version__ = "0.1.0"
