"""Exact solvers for single-scale Dyson-Schwinger equations via decorated
trees, binary tubings and fixed-point iteration."""

from .poly import Poly, Series, parse_poly
from .trees import DecoratedTree, PrimitiveInfo, parse_tree, single_primitive
from .cocycle import MellinSeries, apply_cocycle, phi_recursive
from .tubings import enumerate_tubings, phi_tubing

__all__ = [
    "Poly",
    "Series",
    "parse_poly",
    "DecoratedTree",
    "PrimitiveInfo",
    "parse_tree",
    "single_primitive",
    "MellinSeries",
    "apply_cocycle",
    "phi_recursive",
    "enumerate_tubings",
    "phi_tubing",
]
