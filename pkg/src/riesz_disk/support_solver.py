"""Support of the extremal measure: shape tests, the F-functional and critical radius/height."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import (NoRootError, PointChargeField, h_minus, h_plus_candidates,
                     p_of_h)
from .radial_calculus import RadialFunction, RieszParams, _jacobi01
from .special_functions import gamma_fn


class HypothesisError(ValueError):
    """The field does not satisfy the hypotheses of the requested computation."""


@dataclass(frozen=True)
class SupportDecision:
    kind: str  # full_disk | disk | ring | unknown
    rationale: str  # field_convex_increasing | field_convex_decreasing | field_convex | insufficient_hypotheses
    R: float | None = None
    a: float | None = None
    b: float | None = None

    def __post_init__(self):
        if self.kind == "disk" and self.R is not None and not 0 < self.R <= 1:
            raise ValueError("disk radius must lie in (0, 1]")
        if self.kind == "ring" and self.a is not None and self.b is not None:
            if not 0 <= self.a < self.b <= 1:
                raise ValueError("ring needs 0 <= a < b <= 1")


N_SAMPLES = 200
SHAPE_TOL = 1e-9


def classify_support(Q: RadialFunction, n: int = N_SAMPLES, tol: float = SHAPE_TOL) -> SupportDecision:
    """Convexity and monotonicity of Q on [0, 1] from sampled differences."""
    r = np.linspace(0.0, 1.0, n)
    v = np.asarray(Q.eval(r), dtype=float)
    scale = max(1.0, float(np.max(np.abs(v))))
    d1 = np.diff(v)
    d2 = np.diff(v, 2)
    flat = tol * scale
    if np.all(np.abs(d1) <= flat):
        return SupportDecision("full_disk", "field_convex", R=1.0)
    if np.any(d2 < -flat):
        return SupportDecision("unknown", "insufficient_hypotheses")
    if np.all(d1 >= -flat):
        return SupportDecision("disk", "field_convex_increasing")
    if np.all(d1 <= flat):
        return SupportDecision("ring", "field_convex_decreasing", b=1.0)
    return SupportDecision("ring", "field_convex")


def _ms_constant(params: RieszParams) -> float:
    """W_s of the unit disk (reciprocal capacity)."""
    d, lam = params.d, params.lam
    return (math.pi * gamma_fn((d + 2 * lam - 1) / 2)
            / (math.sin(lam * math.pi) * gamma_fn(lam) * gamma_fn((d - 1) / 2)))


def _radial_moment(fn, params: RieszParams, R: float, power: int, n: int) -> float:
    """int_0^R fn(r) (R^2 - r^2)^(lam-1) r^power dr, r = R t, Jacobi weight (1-t)^(lam-1)."""
    lam = params.lam
    t, wt = _jacobi01(n, 0.0, lam - 1.0)
    vals = fn(R * t) * (1.0 + t) ** (lam - 1.0) * t ** power
    return R ** (power + 2 * lam - 1) * float(vals @ wt)


def ms_functional(Q: RadialFunction, params: RieszParams, R: float, n: int = 128) -> float:
    """Weighted energy of the equilibrium measure of the disk of radius R."""
    if not 0 < R <= 1:
        raise ValueError("R must lie in (0, 1]")
    lam, d = params.lam, params.d
    integral = _radial_moment(Q.eval, params, R, d - 2, n)
    return _ms_constant(params) * R ** (-params.s) * (
        1.0 + 2.0 * math.sin(lam * math.pi) / math.pi * integral)


def w_of_R(Q: RadialFunction, params: RieszParams, R: float, n: int = 128) -> float:
    if Q.deriv1 is None:
        raise HypothesisError("critical radius needs Q'")
    return _radial_moment(Q.deriv1, params, R, params.d - 1, n)


def delta_of_R(Q: RadialFunction, params: RieszParams, R: float, n: int = 128) -> float:
    lam = params.lam
    return math.pi * params.s / (2.0 * math.sin(lam * math.pi)) - w_of_R(Q, params, R, n)


def critical_radius(Q: RadialFunction, params: RieszParams, tol: float = 1e-12,
                    decision: SupportDecision | None = None) -> float:
    """Radius R* of the disk support; 1 when Delta stays positive on (0, 1]."""
    decision = decision or classify_support(Q)
    if decision.kind not in ("disk", "full_disk"):
        raise HypothesisError(f"field is not convex increasing ({decision.rationale})")
    if delta_of_R(Q, params, 1.0) >= 0.0:
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if delta_of_R(Q, params, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class CriticalHeight:
    h_minus: float
    h_plus: float
    h_plus_candidates: tuple
    threshold: float

    def as_dict(self) -> dict:
        return {"h_minus": self.h_minus, "h_plus": self.h_plus,
                "h_plus_candidates": list(self.h_plus_candidates),
                "threshold": self.threshold}


def critical_height(field: PointChargeField, params: RieszParams, p=None) -> CriticalHeight:
    """h_-, all scanned roots of p, and the sufficient height max(h_-, largest root)."""
    hm = h_minus(field, params)
    if p is None:
        p = lambda h: p_of_h(field, params, h)
    roots = h_plus_candidates(field, params, p)
    if not roots:
        raise NoRootError("p(h) has no sign change on [1e-3, 1e3]", hm)
    roots = tuple(float(x) for x in roots)
    return CriticalHeight(float(hm), roots[-1], roots, max(float(hm), roots[-1]))
