"""Quadratic jerk system: parameters, equilibria, Jacobian, order reduction.

The system is

    D^a1 x = y
    D^a2 y = z
    D^a3 z = -eps^2 - b*y - a*eps*z + x^2

with Caputo derivatives of orders in (0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .exceptions import NonRationalOrder

__all__ = [
    "JerkParams",
    "OrderSpec",
    "ReducedOrders",
    "Equilibrium",
    "vector_field",
    "equilibria",
    "jacobian_at",
    "reduce_orders",
]

PLUS = "plus"
MINUS = "minus"

_RationalLike = int | Fraction | str


@dataclass(frozen=True)
class JerkParams:
    """System constants a, b and the bifurcation parameter epsilon."""

    a: float
    b: float
    epsilon: float

    @property
    def degenerate(self) -> bool:
        """True when epsilon = 0 and the two equilibria coincide."""
        return self.epsilon == 0.0


def _as_fraction(value: _RationalLike | float) -> Fraction:
    if isinstance(value, float):
        raise NonRationalOrder(
            f"incommensurate orders must be exact rationals, got float {value!r}; "
            "pass a Fraction, an int, or a string like '99/100'"
        )
    return Fraction(value)


@dataclass(frozen=True)
class OrderSpec:
    """Fractional orders: one commensurate alpha or a rational triple.

    Use the :meth:`commensurate` / :meth:`incommensurate` constructors.
    """

    alphas: tuple[float, float, float]
    is_commensurate: bool
    rationals: tuple[Fraction, Fraction, Fraction] | None = None

    @classmethod
    def commensurate(cls, alpha: float | _RationalLike) -> "OrderSpec":
        """Single shared order alpha in (0, 1].

        A rational input (Fraction, int, or '99/100') is remembered exactly so
        the order-reduction path stays available; a float is accepted for
        simulation but cannot be reduced.
        """
        rationals = None
        if not isinstance(alpha, float):
            frac = Fraction(alpha)
            rationals = (frac, frac, frac)
            alpha = float(frac)
        if not 0.0 < alpha <= 1.0:
            raise ValueError(f"order alpha must lie in (0, 1], got {alpha}")
        return cls((alpha, alpha, alpha), True, rationals)

    @classmethod
    def incommensurate(
        cls,
        a1: _RationalLike,
        a2: _RationalLike,
        a3: _RationalLike,
    ) -> "OrderSpec":
        """Per-equation rational orders v_i/u_i, each in (0, 1]."""
        fracs = tuple(_as_fraction(v) for v in (a1, a2, a3))
        for f in fracs:
            if not 0 < f <= 1:
                raise ValueError(f"order {f} outside (0, 1]")
        return cls(tuple(float(f) for f in fracs), False, fracs)

    @property
    def alpha(self) -> float:
        if not self.is_commensurate:
            raise ValueError("incommensurate OrderSpec has no single alpha")
        return self.alphas[0]


@dataclass(frozen=True)
class ReducedOrders:
    """Integer order lift: M = lcm of denominators, (p, q, m) = M * alphas."""

    M: int
    p: int
    q: int
    m: int
    theta: float = field(init=False)

    def __post_init__(self):
        if self.M <= 0 or not all(0 < k <= self.M for k in (self.p, self.q, self.m)):
            raise ValueError(f"invalid reduction M={self.M}, p={self.p}, q={self.q}, m={self.m}")
        object.__setattr__(self, "theta", math.pi / (2 * self.M))


@dataclass(frozen=True)
class Equilibrium:
    """One of the fixed points (+eps, 0, 0) or (-eps, 0, 0)."""

    point: tuple[float, float, float]
    branch: str
    degenerate: bool = False


def vector_field(params: JerkParams, state: Iterable[float]) -> np.ndarray:
    """Right-hand side (y, z, -eps^2 - b*y - a*eps*z + x^2)."""
    x, y, z = state
    eps = params.epsilon
    return np.array(
        [y, z, -eps * eps - params.b * y - params.a * eps * z + x * x]
    )


def equilibria(params: JerkParams) -> list[Equilibrium]:
    """Fixed points E1 = (eps, 0, 0), E2 = (-eps, 0, 0).

    At eps = 0 the two coincide; a single flagged equilibrium at the origin
    is returned.
    """
    eps = params.epsilon
    if eps == 0.0:
        return [Equilibrium((0.0, 0.0, 0.0), PLUS, degenerate=True)]
    return [
        Equilibrium((eps, 0.0, 0.0), PLUS),
        Equilibrium((-eps, 0.0, 0.0), MINUS),
    ]


def jacobian(params: JerkParams, state: Iterable[float]) -> np.ndarray:
    """Jacobian of the vector field at an arbitrary state."""
    x, _, _ = state
    return np.array(
        [
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [2.0 * x, -params.b, -params.a * params.epsilon],
        ]
    )


def jacobian_at(params: JerkParams, eq: Equilibrium) -> np.ndarray:
    """Jacobian at an equilibrium; bottom row (+-2*eps, -b, -a*eps)."""
    return jacobian(params, eq.point)


def reduce_orders(orders: OrderSpec) -> ReducedOrders:
    """Exact integer lift (M, p, q, m) with M = lcm(u1, u2, u3).

    Requires rational orders; floats on the commensurate path are rejected
    rather than silently rationalized.
    """
    if orders.rationals is None:
        raise NonRationalOrder(
            "order reduction needs exact rational orders; construct the "
            "OrderSpec from Fractions or strings like '99/100'"
        )
    f1, f2, f3 = orders.rationals
    M = math.lcm(f1.denominator, f2.denominator, f3.denominator)
    p, q, m = (int(M * f) for f in (f1, f2, f3))
    return ReducedOrders(M=M, p=p, q=q, m=m)
