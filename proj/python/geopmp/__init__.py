"""Geometric Pontryagin maximum principle with Lie-Poisson reduction."""

from ._core import (
    ArgumentError,
    Error,
    LieAlgebra,
    body_momentum_heisenberg,
    evaluate_expression,
    geodesic_oracle,
    geodesic_report,
    graph_is_dirac,
    integrate_pmp_heisenberg,
    integrate_reduced_heisenberg,
    reduced_fiber_is_dirac,
    run_cli,
)

__all__ = [
    "ArgumentError",
    "Error",
    "LieAlgebra",
    "body_momentum_heisenberg",
    "evaluate_expression",
    "geodesic_oracle",
    "geodesic_report",
    "graph_is_dirac",
    "integrate_pmp_heisenberg",
    "integrate_reduced_heisenberg",
    "reduced_fiber_is_dirac",
    "run_cli",
]
