"""Fractional-order quadratic jerk system toolkit.

Simulation (Caputo predictor-corrector), Hopf critical-value analysis for
commensurate and incommensurate orders, and chaos diagnostics (bifurcation
sweeps, Lyapunov spectra).
"""

from .model import (
    Equilibrium,
    JerkParams,
    OrderSpec,
    ReducedOrders,
    equilibria,
    jacobian_at,
    reduce_orders,
    vector_field,
)
from .solver import (
    SolveConfig,
    Trajectory,
    abm_weights,
    caputo_abm,
    integrate,
    integrate_with_tangent,
)

__all__ = [
    "JerkParams",
    "OrderSpec",
    "ReducedOrders",
    "Equilibrium",
    "vector_field",
    "equilibria",
    "jacobian_at",
    "reduce_orders",
    "SolveConfig",
    "Trajectory",
    "abm_weights",
    "caputo_abm",
    "integrate",
    "integrate_with_tangent",
]

__version__ = "0.1.0"
