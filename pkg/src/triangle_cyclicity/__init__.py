"""Abelian integrals, zero counting and limit cycles for the perturbed triangle centre."""

from .cyclicity import PerturbationParams, ZeroReport, count_zeros, ect_window, find_three_zeros, scan
from .geometry import DomainError, oval_extent
from .picard_fuchs import default_flow
from .quadrature import integral_frame
from .ratio import ratio_point
from .simulate import EpsVector, count_cycles, eps_from_mu, poincare_return

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "EpsVector",
    "PerturbationParams",
    "ZeroReport",
    "count_cycles",
    "count_zeros",
    "default_flow",
    "ect_window",
    "eps_from_mu",
    "find_three_zeros",
    "integral_frame",
    "oval_extent",
    "poincare_return",
    "ratio_point",
    "scan",
]
