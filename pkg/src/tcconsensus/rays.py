"""Box-and-ray sector geometry and the scalar monitor functions built on it.

A :class:`BoxRaySpec` bundles a box ``[box_lo, box_hi]``, an anchor
``anchor`` inside it, and two ray slopes ``k1`` (left ray, on
``(-inf, anchor]``) and ``k2`` (right ray, on ``[anchor, +inf)``). The rays

    L1(x) = k1 * (x - anchor) + anchor
    L2(x) = k2 * (x - anchor) + anchor

bracket admissible constraint functions outside the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError

PRODUCT_TOL = 1e-12


@dataclass(frozen=True)
class BoxRaySpec:
    box_lo: float
    box_hi: float
    anchor: float
    k1: float
    k2: float

    def __post_init__(self):
        if not (self.box_lo <= self.anchor <= self.box_hi):
            raise ValueError(
                f"anchor {self.anchor} outside box [{self.box_lo}, {self.box_hi}]"
            )

    def l1(self, x: float) -> float:
        return self.k1 * (x - self.anchor) + self.anchor

    def l2(self, x: float) -> float:
        return self.k2 * (x - self.anchor) + self.anchor

    @property
    def slope_product(self) -> float:
        return self.k1 * self.k2

    def check_unit_product(self, tol: float = PRODUCT_TOL) -> bool:
        """Theorem-1/Lemma-5 slope rule: both negative, product one."""
        return (
            self.k1 < 0
            and self.k2 < 0
            and abs(self.k1 * self.k2 - 1.0) <= tol
        )


@dataclass(frozen=True)
class EquilibriumRaySpec:
    """Parallel-ray slopes around an equilibrium: both negative, product one."""

    k_e1: float
    k_e2: float

    def __post_init__(self):
        if not (self.k_e1 < 0 and self.k_e2 < 0):
            raise ValueError("equilibrium ray slopes must be negative")
        if abs(self.k_e1 * self.k_e2 - 1.0) > PRODUCT_TOL:
            raise ValueError("equilibrium ray slope product must be 1")


@dataclass(frozen=True)
class GeometryReport:
    """Box diameter against the two ray-projection quantities."""

    diameter: float
    min_branch: float
    max_branch: float

    @property
    def meets_min(self) -> bool:
        return self.diameter >= self.min_branch - 1e-12

    @property
    def meets_max(self) -> bool:
        return self.diameter >= self.max_branch - 1e-12


def ray_geometry_check(spec: BoxRaySpec) -> GeometryReport:
    """Compare the box diameter with min/max of the two ray projections.

    The minimum branch is always a guaranteed floor when the slope product
    is one; the maximum branch is the hypothesis of the monotone-Y lemma.
    """
    a = (1.0 - spec.k2) * (spec.box_hi - spec.anchor)
    b = (1.0 - spec.k1) * (spec.anchor - spec.box_lo)
    return GeometryReport(
        diameter=spec.box_hi - spec.box_lo,
        min_branch=min(a, b),
        max_branch=max(a, b),
    )


Y_TERMS = ("box", "xM_minus_lo", "hi_minus_xm", "right_ray", "left_ray")


def lyapunov_Y(state, spec: BoxRaySpec) -> tuple[float, str]:
    """Max-of-five monitor; non-increasing along admissible trajectories.

    Returns ``(value, term)`` where ``term`` names the attaining entry.
    Ties resolve in ``Y_TERMS`` order, so the box term wins ties.
    """
    x = np.asarray(state, dtype=float)
    x_m = float(x.min())
    x_M = float(x.max())
    terms = (
        spec.box_hi - spec.box_lo,
        x_M - spec.box_lo,
        spec.box_hi - x_m,
        (1.0 - spec.k2) * (x_M - spec.anchor),
        (1.0 - spec.k1) * (spec.anchor - x_m),
    )
    best = max(range(5), key=lambda i: (terms[i], -i))
    return terms[best], Y_TERMS[best]


def lyapunov_V(state, equilibrium, spec: EquilibriumRaySpec) -> float:
    """Max over agents of the two-sided weighted error around ``equilibrium``."""
    x = np.asarray(state, dtype=float)
    e = np.asarray(equilibrium, dtype=float)
    if x.shape != e.shape:
        raise DimensionMismatchError(
            f"state shape {x.shape} != equilibrium shape {e.shape}"
        )
    eps = x - e
    left = (1.0 - spec.k_e1) * (-eps)
    right = (1.0 - spec.k_e2) * eps
    return float(np.maximum(left, right).max())


def distance_to_box(state, box_lo: float, box_hi: float) -> float:
    """Euclidean distance from ``state`` to the box ``[box_lo, box_hi]^n``."""
    if box_lo > box_hi:
        raise ValueError("box_lo must not exceed box_hi")
    x = np.asarray(state, dtype=float)
    excess = np.maximum(box_lo - x, 0.0) + np.maximum(x - box_hi, 0.0)
    return float(math.sqrt(float((excess**2).sum())))
