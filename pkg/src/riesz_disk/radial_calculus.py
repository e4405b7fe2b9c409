"""Abel transforms and the field -> density-correction pipeline.

Every singular integral is first mapped to [0, 1] so that the endpoint
behaviour becomes a Jacobi weight; derivatives are then taken under the
integral sign and only need Q' (and Q'' for F).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import roots_jacobi, roots_legendre

from .special_functions import beta_fn, gamma_fn


class SingularInputError(ValueError):
    """The integrand is not finite at a quadrature node."""


class MissingDerivativeError(ValueError):
    """A derivative callback needed by the operation is absent."""


@dataclass(frozen=True)
class RieszParams:
    """Dimension d and Riesz exponent s = d - 3 + 2*lam, 0 < lam < 1."""

    d: int
    lam: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 3:
            raise ValueError(f"d must be an integer >= 3, got {self.d}")
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"lambda out of (0,1): {self.lam}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "lam", float(self.lam))

    @classmethod
    def from_s(cls, d: int, s: float) -> "RieszParams":
        return cls(d, (s - d + 3) / 2.0)

    @property
    def s(self) -> float:
        return self.d - 3 + 2.0 * self.lam

    @property
    def sphere_area(self) -> float:
        # area of the unit (d-2)-sphere bounding the radial slices
        return 2.0 * math.pi ** ((self.d - 1) / 2) / gamma_fn((self.d - 1) / 2)

    def as_dict(self) -> dict:
        return {"d": self.d, "lambda": self.lam, "s": self.s}


@dataclass(frozen=True)
class RadialFunction:
    """Radial profile on [lo, hi].

    With ``edge_exponent`` g != 0 the callbacks describe the smooth factor
    phi and the represented function is (hi^2 - r^2)^g * phi(r).
    Callbacks must accept numpy arrays.
    """

    eval: Callable
    deriv1: Optional[Callable] = None
    deriv2: Optional[Callable] = None
    lo: float = 0.0
    hi: float = 1.0
    edge_exponent: float = 0.0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = self.eval(r)
        if self.edge_exponent:
            out = out * (self.hi ** 2 - r ** 2) ** self.edge_exponent
        return out

    def __add__(self, other: "RadialFunction") -> "RadialFunction":
        if self.edge_exponent or other.edge_exponent:
            raise ValueError("only plain profiles can be added")
        return RadialFunction(
            lambda r: self.eval(r) + other.eval(r),
            _sum_opt(self.deriv1, other.deriv1),
            _sum_opt(self.deriv2, other.deriv2),
            max(self.lo, other.lo), min(self.hi, other.hi))

    def scaled(self, c: float) -> "RadialFunction":
        return RadialFunction(
            lambda r: c * self.eval(r),
            None if self.deriv1 is None else (lambda r: c * self.deriv1(r)),
            None if self.deriv2 is None else (lambda r: c * self.deriv2(r)),
            self.lo, self.hi, self.edge_exponent)


def _sum_opt(f, g):
    if f is None or g is None:
        return None
    return lambda r: f(r) + g(r)


def tabulated_field(r, q) -> RadialFunction:
    """Cubic spline with natural ends through samples (r_i, Q_i)."""
    r = np.asarray(r, dtype=float)
    if np.any(np.diff(r) <= 0):
        raise ValueError("tabulated r must be strictly increasing")
    spl = CubicSpline(r, np.asarray(q, dtype=float), bc_type="natural")
    d1, d2 = spl.derivative(1), spl.derivative(2)
    return RadialFunction(spl, d1, d2, float(r[0]), float(r[-1]))


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str = "gauss_legendre"
    exponents: tuple = field(default=(0.0, 0.0))


@lru_cache(maxsize=256)
def _jacobi01(n: int, left: float, right: float):
    # weight w^left (1-w)^right on [0, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        x, wt = roots_jacobi(n, right, left)
    nodes = 0.5 * (x + 1.0)
    weights = wt / 2.0 ** (1.0 + left + right)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=256)
def _jacobi_sq(n: int, left: float, right: float):
    """Rule for w^left (1-w)^right on [0, 1] with nodes w = v^2.

    rho = sqrt(t^2 + D w) is then analytic in v at t = 0, so fields that are
    not even in rho keep spectral accuracy near the centre.
    """
    v, wt = _jacobi01(n, 2.0 * left + 1.0, right)
    nodes = v * v
    weights = 2.0 * wt * (1.0 + v) ** right
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_jacobi(n: int, left: float = 0.0, right: float = 0.0) -> QuadratureRule:
    """n-point rule on [0,1] for the weight w^left (1-w)^right."""
    x, w = _jacobi01(int(n), float(left), float(right))
    return QuadratureRule(x, w, "gauss_jacobi", (left, right))


def gauss_legendre(n: int, lo: float = 0.0, hi: float = 1.0) -> QuadratureRule:
    x, w = roots_legendre(int(n))
    half = 0.5 * (hi - lo)
    return QuadratureRule(lo + half * (x + 1.0), half * w, "gauss_legendre")


N_START = 64
N_MAX = 512


def _adaptive(fn, rel_tol=1e-13, n0=N_START, nmax=N_MAX):
    """fn(n) -> value; double n until two successive values agree.

    Stops early once the differences stop shrinking: high-order Jacobi rules
    with strongly singular weights lose digits, so refining further only adds roundoff.
    """
    prev = fn(n0)
    n = n0
    last = math.inf
    while n < nmax:
        n *= 2
        cur = fn(n)
        diff = abs(cur - prev)
        if diff <= rel_tol * max(abs(cur), 1e-300) or diff < 1e-300:
            return cur
        if diff >= last:
            return prev
        last = diff
        prev = cur
    return prev


def _check_finite(vals):
    if not np.all(np.isfinite(vals)):
        raise SingularInputError("integrand not finite at a quadrature node")
    return vals


def _smooth_parts(f: RadialFunction, upper: float):
    g = f.edge_exponent
    if g and not math.isclose(upper, f.hi):
        raise ValueError("an edge exponent requires upper == hi")
    return g


def abel_forward(f: RadialFunction, params: RieszParams, t: float, upper: float,
                 rel_tol: float = 1e-13) -> float:
    """int_t^upper f(rho) rho (rho^2 - t^2)^(-lam) d rho."""
    if not 0.0 <= t < upper:
        raise ValueError("need 0 <= t < upper")
    lam = params.lam
    g = _smooth_parts(f, upper)
    D = upper * upper - t * t

    def run(n):
        w, wt = _jacobi_sq(n, -lam, g)
        rho = np.sqrt(t * t + D * w)
        return float(np.dot(wt, _check_finite(f.eval(rho))))

    return 0.5 * D ** (1.0 - lam + g) * _adaptive(run, rel_tol)


def abel_transform(f: RadialFunction, params: RieszParams, upper: float) -> RadialFunction:
    """S = forward Abel transform of f as a RadialFunction with S' attached.

    For f = (upper^2 - rho^2)^g phi the result carries edge exponent
    g + 1 - lam and a smooth factor built from phi alone.
    """
    lam = params.lam
    g = _smooth_parts(f, upper)
    n = 128

    def sigma(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        w, wt = _jacobi_sq(n, -lam, g)
        rho = np.sqrt(np.outer(t * t, 1 - w) + upper * upper * w)
        return 0.5 * (f.eval(rho) @ wt)

    def dsigma(t):
        if f.deriv1 is None:
            raise MissingDerivativeError("abel_transform derivative needs f.deriv1")
        t = np.atleast_1d(np.asarray(t, dtype=float))
        w, wt = _jacobi_sq(n, -lam, g + 1.0)
        rho = np.sqrt(np.outer(t * t, 1 - w) + upper * upper * w)
        return 0.5 * t * ((f.deriv1(rho) / rho) @ wt)

    return RadialFunction(sigma, dsigma if f.deriv1 is not None else None, None,
                          0.0, upper, g + 1.0 - lam)


def abel_invert(S: RadialFunction, params: RieszParams, t: float, upper: float,
                rel_tol: float = 1e-13) -> float:
    """-(2 sin(lam pi)/pi) (1/t) d/dt int_t^upper S(rho) rho (rho^2-t^2)^(lam-1) d rho.

    With rho^2 = t^2 + (upper^2 - t^2) w the 1/t cancels analytically,
    so t = 0 is evaluated without a limit.
    """
    if S.deriv1 is None:
        raise MissingDerivativeError("abel_invert requires S.deriv1")
    if not 0.0 <= t < upper:
        raise ValueError("need 0 <= t < upper")
    lam = params.lam
    g = _smooth_parts(S, upper)
    D = upper * upper - t * t
    p = lam + g

    def run(n):
        w, wt = _jacobi_sq(n, lam - 1.0, g)
        rho = np.sqrt(t * t + D * w)
        j0 = np.dot(wt, _check_finite(S.eval(rho)))
        w1, wt1 = _jacobi_sq(n, lam - 1.0, g + 1.0)
        rho1 = np.sqrt(t * t + D * w1)
        j1 = np.dot(wt1, _check_finite(S.deriv1(rho1) / rho1))
        # (1/t) dI/dt with I = D^p/2 * j0
        return -p * D ** (p - 1.0) * j0 + 0.5 * D ** p * j1

    return float(-2.0 * math.sin(lam * math.pi) / math.pi * _adaptive(run, rel_tol))


# ---------------------------------------------------------------------------
# field -> g -> F


def _need(fn, name):
    if fn is None:
        raise MissingDerivativeError(f"field needs {name}")
    return fn


def _g_terms(Q: RadialFunction, params: RieszParams, r, n: int, order: int):
    """g (order 0) or g' (order 1) at an array of radii using n-point rules."""
    d, lam = params.d, params.lam
    r = np.atleast_1d(np.asarray(r, dtype=float))
    wa, wta = _jacobi01(n, lam - 1.0, (d - 2) / 2.0)
    ua = r[:, None] * np.sqrt(1.0 - wa)[None, :]
    if order == 0:
        w0, wt0 = _jacobi01(n, lam - 1.0, (d - 3) / 2.0)
        u0 = r[:, None] * np.sqrt(1.0 - w0)[None, :]
        i0 = Q.eval(u0) @ wt0
        i1 = _need(Q.deriv1, "deriv1")(ua) @ wta
        return 0.5 * (d + 2 * lam - 3) * i0 + 0.5 * r * i1
    wb, wtb = _jacobi01(n, lam - 1.0, (d - 1) / 2.0)
    ub = r[:, None] * np.sqrt(1.0 - wb)[None, :]
    i1 = _need(Q.deriv1, "deriv1")(ua) @ wta
    i2 = _need(Q.deriv2, "deriv2")(ub) @ wtb
    return 0.5 * (d + 2 * lam - 2) * i1 + 0.5 * r * i2


def field_to_g(Q: RadialFunction, params: RieszParams, r: float,
               rel_tol: float = 1e-13) -> float:
    """g(r) = r^-(d+2lam-4) d/dr int_0^r Q(u) u^(d-2) (r^2-u^2)^(lam-1) du."""
    _need(Q.deriv1, "deriv1")
    return _adaptive(lambda n: float(_g_terms(Q, params, r, n, 0)[0]), rel_tol)


def g_profile(Q: RadialFunction, params: RieszParams, n: int = 128) -> RadialFunction:
    """g as a RadialFunction (with g') for use inside Abel inversion."""
    _need(Q.deriv1, "deriv1")
    return RadialFunction(
        lambda r: _g_terms(Q, params, np.ravel(r), n, 0).reshape(np.shape(r)),
        lambda r: _g_terms(Q, params, np.ravel(r), n, 1).reshape(np.shape(r)))


def F_prefactor(params: RieszParams) -> float:
    """F = F_prefactor * abel_invert(g)."""
    d, lam = params.d, params.lam
    return -gamma_fn((d - 3) / 2 + lam) / (2.0 * math.pi ** ((d - 1) / 2) * gamma_fn(lam))


def field_to_F(Q: RadialFunction, params: RieszParams, t: float, R: float,
               rel_tol: float = 1e-12) -> float:
    """Density correction F(t) on the disk of radius R (0 <= t < R)."""
    _need(Q.deriv1, "deriv1")
    _need(Q.deriv2, "deriv2")
    if not 0.0 <= t < R:
        raise ValueError("need 0 <= t < R")

    def run(n):
        g = g_profile(Q, params, n)
        return abel_invert(g, params, t, R, rel_tol=rel_tol)

    return F_prefactor(params) * _adaptive(run, rel_tol, n0=64, nmax=256)


def field_to_F_smooth(Q: RadialFunction, params: RieszParams, t, R: float, n: int = 128):
    """(R^2 - t^2)^(1-lam) F(t), vectorised over t; smooth up to t = R."""
    lam = params.lam
    t = np.atleast_1d(np.asarray(t, dtype=float))
    g = g_profile(Q, params, n)
    D = R * R - t * t
    w, wt = _jacobi_sq(n, lam - 1.0, 0.0)
    rho = np.sqrt(np.outer(t * t, 1 - w) + R * R * w)
    j0 = g.eval(rho.ravel()).reshape(rho.shape) @ wt
    w1, wt1 = _jacobi_sq(n, lam - 1.0, 1.0)
    rho1 = np.sqrt(np.outer(t * t, 1 - w1) + R * R * w1)
    j1 = (g.deriv1(rho1.ravel()).reshape(rho1.shape) / rho1) @ wt1
    inv = -2.0 * math.sin(lam * math.pi) / math.pi * (-lam * j0 + 0.5 * D * j1)
    return F_prefactor(params) * inv


def disk_mass_constant(params: RieszParams) -> float:
    """int_0^R f t^(d-2) dt must equal this for a unit measure."""
    return 1.0 / params.sphere_area


def beta_constant(params: RieszParams) -> float:
    return beta_fn(params.lam, (params.d - 1) / 2.0)
