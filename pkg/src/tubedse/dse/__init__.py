"""Dyson-Schwinger specifications, solvers and identity checks."""

from .spec import ChargeStructure, DSESpec, SpecError, load_spec, parse_spec, simple_spec
from .solvers import (
    phi_image,
    solve_analytic_oracle,
    solve_analytic_tubing,
    solve_combinatorial_closed,
    solve_combinatorial_fixpoint,
)
from .checks import (
    ConfigurationError,
    check_gamma_equation,
    check_rge,
    extract_gamma_beta,
    invariant_charge,
    rio_coproduct_check,
)
from .quasilinear import quasilinear_reduce
from .counterexample import counterexample_report

__all__ = [
    "ChargeStructure",
    "DSESpec",
    "SpecError",
    "load_spec",
    "parse_spec",
    "simple_spec",
    "phi_image",
    "solve_analytic_oracle",
    "solve_analytic_tubing",
    "solve_combinatorial_closed",
    "solve_combinatorial_fixpoint",
    "ConfigurationError",
    "check_gamma_equation",
    "check_rge",
    "extract_gamma_beta",
    "invariant_charge",
    "rio_coproduct_check",
    "quasilinear_reduce",
    "counterexample_report",
]
