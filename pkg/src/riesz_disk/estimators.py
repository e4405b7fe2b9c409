"""Estimator-style wrappers: fit(field) solves, predict(r) evaluates the density."""
from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .disk_solver import NegativeDensityWarning, solve_on_disk
from .fields import PointChargeField, ZeroField, parse_field
from .potential_oracle import Tolerances, verify, weighted_potential
from .radial_calculus import RadialFunction, RieszParams
from .ring_fredholm import NystromConfig, ring_solve
from .support_solver import HypothesisError, classify_support, critical_radius


def _as_radial(field, params):
    """(field object or None, RadialFunction) from a spec string, field or profile."""
    if isinstance(field, str):
        field = parse_field(field)
    if isinstance(field, RadialFunction):
        return None, field
    return field, field.radial(params)


class _Equilibrium(BaseEstimator):

    def _params(self) -> RieszParams:
        return RieszParams(self.d, self.lam)

    def predict(self, r):
        """Density f(r); zero off the support."""
        check_is_fitted(self, "result_")
        r = np.asarray(r, dtype=float)
        a, b = self.support_
        inside = (r > a) & (r < b) if a > 0 else (r >= 0) & (r < b)
        out = np.zeros_like(r)
        out[inside] = self.result_.density(r[inside])
        return out

    def weighted_potential(self, r):
        """U(r) + Q(r) from direct quadrature of the fitted density."""
        check_is_fitted(self, "result_")
        return weighted_potential(self.result_.density, self.field_, self._params(), r)

    def verify(self, tol: Tolerances = Tolerances()):
        check_is_fitted(self, "result_")
        return verify(self.result_, self.field_, self._params(), tol)


class DiskEquilibrium(_Equilibrium):
    """Extremal measure supported on a disk of radius R.

    R=None picks R* for convex increasing fields and R=1 for a point charge.
    """

    def __init__(self, d=3, lam=0.5, R=None, grid_n=64):
        self.d = d
        self.lam = lam
        self.R = R
        self.grid_n = grid_n

    def fit(self, field, y=None):
        params = self._params()
        obj, Q = _as_radial(field, params)
        R = self.R
        if R is None:
            if isinstance(obj, PointChargeField):
                R = 1.0
            else:
                decision = classify_support(Q)
                if decision.kind not in ("disk", "full_disk"):
                    raise HypothesisError(f"support is not a disk ({decision.rationale})")
                R = critical_radius(Q, params, decision=decision)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NegativeDensityWarning)
            self.result_ = solve_on_disk(Q, params, R, grid_n=self.grid_n)
        self.field_ = Q
        self.support_ = (0.0, float(R))
        self.R_ = float(R)
        self.F_Q_ = self.result_.F_Q
        self.C_Q_ = self.result_.C_Q
        return self


class RingEquilibrium(_Equilibrium):
    """Extremal measure on a chosen ring a <= r <= b via the Fredholm equation."""

    def __init__(self, d=3, lam=0.5, a=0.0, b=1.0, n_nodes=256, grading=4, grid_n=64):
        self.d = d
        self.lam = lam
        self.a = a
        self.b = b
        self.n_nodes = n_nodes
        self.grading = grading
        self.grid_n = grid_n

    def fit(self, field, y=None):
        params = self._params()
        obj, Q = _as_radial(field, params)
        cfg = NystromConfig(self.n_nodes, grading=self.grading)
        self.result_ = ring_solve(None if isinstance(obj, ZeroField) else Q, params,
                                  self.a, self.b, cfg, grid_n=self.grid_n)
        self.field_ = Q
        self.support_ = (float(self.a), float(self.b))
        self.F_Q_ = self.result_.F_Q
        self.residual_norm_ = self.result_.residual_norm
        return self
