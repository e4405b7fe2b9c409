"""Ring supports: Fredholm equation of the second kind for G, Nystrom solve, density recovery.

With G(r) = int_r^b f(t) t (t^2 - r^2)^(-lam) dt the unknown satisfies

    r^e G(r) + P(r) c int_a^b K(u, r) P(u) G(u) du = kappa [F_Q A(r) - B(r)],   a < r < b,

where e = d + 2 lam - 4 and P(x) = (2 sin(lam pi)/pi) x (x^2 - a^2)^(lam - 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .disk_solver import RadialDensity, Support, chebyshev_density
from .radial_calculus import (MissingDerivativeError, RadialFunction, RieszParams,
                              _jacobi01, abel_invert)
from .special_functions import DomainError, digamma, gamma_fn, incomplete_beta, rgamma


class IllConditionedError(RuntimeError):
    """The Nystrom matrix is too ill-conditioned to trust."""


class DegenerateMassError(RuntimeError):
    """The F_Q coefficient carries no mass, so F_Q is undetermined."""


@dataclass(frozen=True)
class NystromConfig:
    n_nodes: int = 256
    grading: int = 4
    rule: str = "gauss_jacobi_graded"
    diag_regularization: str = "limit_formula"
    max_condition: float = 1e12

    def __post_init__(self):
        if self.n_nodes < 8:
            raise ValueError("n_nodes must be >= 8")
        if self.grading < 1:
            raise ValueError("grading must be >= 1")
        if self.diag_regularization not in ("limit_formula",):
            raise ValueError("only the limit formula is supported on the diagonal")


def _constants(params: RieszParams):
    d, lam = params.d, params.lam
    beta = (d + 2 * lam - 3) / 2
    gam = (d - 2 * lam + 3) / 2
    c = gamma_fn(beta) * gamma_fn(3 - 2 * lam) / (2 * gamma_fn(gam))
    kappa = gamma_fn(beta) / (2 * math.pi ** ((d - 1) / 2) * gamma_fn(lam))
    return beta, gam, c, kappa


# ---------------------------------------------------------------------------
# kernel


def _poly_dd(c, x, y):
    """(P(x) - P(y))/(x - y) for P = sum c_n t^n: synthetic division at y, Horner at x."""
    b = np.zeros_like(x)
    S = np.zeros_like(x)
    for n in range(len(c) - 1, 0, -1):
        b = c[n] + y * b
        S = b + x * S
    return S


def _nterms(xmax, cap):
    """Series length for relative accuracy ~1e-17 when the argument is at most xmax."""
    if xmax <= 0:
        return 2
    return int(min(cap, math.ceil(-39.0 / math.log(xmax)) + 8))


def _log1p_ratio(d, y):
    """log1p(d/y)/d, continuous at d = 0."""
    t = d / y
    small = np.abs(t) < 1e-8
    safe = np.where(small, 1.0, t)
    return np.where(small, (1.0 - 0.5 * t) / y, np.log1p(safe) / np.where(small, 1.0, d))


class _Chi:
    """chi(z) = z 2F1(1, beta; gam; z) as coefficient series.

    Around z = 0: chi = sum p_n z^(n+1).  Around z = 1 (w = 1 - z):
    chi = R(w) + w^e S(w), or R(w) + w^m log(w) S(w) when e = gam - 1 - beta = m is an integer.
    Divided differences are taken term by term, so no cancellation occurs.
    """

    N0 = 160
    N1 = 90

    def __init__(self, beta: float, gam: float):
        p = np.empty(self.N0)
        t = 1.0
        for n in range(self.N0):
            p[n] = t
            t *= (1.0 + n) * (beta + n) / ((gam + n) * (n + 1.0))
        self.p = p
        A, B, C = 1.0, beta, gam
        e = C - A - B
        self.e = e
        self.log = abs(e - round(e)) < 1e-12
        R = np.zeros(self.N1)
        S = np.zeros(self.N1)
        if not self.log:
            g1 = gamma_fn(C) * gamma_fn(e) * rgamma(C - A) * rgamma(C - B)
            g2 = gamma_fn(C) * gamma_fn(-e) * rgamma(A) * rgamma(B)
            t1 = t2 = 1.0
            for n in range(self.N1):
                R[n], S[n] = g1 * t1, g2 * t2
                t1 *= (A + n) * (B + n) / ((1 - e + n) * (n + 1.0))
                t2 *= (C - A + n) * (C - B + n) / ((1 + e + n) * (n + 1.0))
        else:
            m = int(round(e))
            self.m = m
            if m > 0:
                pre = gamma_fn(m) * gamma_fn(C) * rgamma(A + m) * rgamma(B + m)
                term = 1.0
                for n in range(m):
                    R[n] += pre * term
                    term *= (A + n) * (B + n) / ((n + 1.0) * (n + 1.0 - m)) if n + 1 < m else 0.0
            pre = -((-1) ** m) * gamma_fn(C) * rgamma(A) * rgamma(B)
            psi = -digamma(1.0) - digamma(m + 1.0) + digamma(A + m) + digamma(B + m)
            term = 1.0 / math.factorial(m)
            for n in range(self.N1 - m):
                S[n] = pre * term
                R[n + m] += pre * term * psi
                psi += -1.0 / (n + 1) - 1.0 / (n + m + 1) + 1.0 / (A + n + m) + 1.0 / (B + n + m)
                term *= (A + m + n) * (B + m + n) / ((n + 1.0) * (n + m + 1.0))
        # chi = (1 - w) F
        self.R = R - np.concatenate(([0.0], R[:-1]))
        self.S = S - np.concatenate(([0.0], S[:-1]))

    def dd_small(self, z1, z2):
        """chi[z1, z2] for z <= 0.75."""
        N = _nterms(float(np.max(z2)), self.N0)
        return _poly_dd(np.concatenate(([0.0], self.p[:N])), z1, z2)

    def dd_near_one(self, w1, w2):
        """chi[z1, z2] for w <= 0.5, returned as a derivative in z (sign flipped from w)."""
        N = _nterms(float(np.max(w1)), self.N1)
        R, S = self.R[:N], self.S[:N]
        Rdd = _poly_dd(R, w1, w2)
        S2 = np.polynomial.polynomial.polyval(w2, S)
        Sdd = _poly_dd(S, w1, w2)
        d = w1 - w2
        if not self.log:
            e = self.e
            # (w^e)[w1, w2] = w2^e expm1(e log1p(d/w2)) / d
            t = d / w2
            small = np.abs(t) < 1e-8
            safe_d = np.where(small, 1.0, d)
            powdd = np.where(small, e * w2 ** (e - 1) * (1 + 0.5 * (e - 1) * t),
                             w2 ** e * np.expm1(e * np.log1p(np.where(small, 0.0, t))) / safe_d)
            sing_dd = powdd * S2 + w1 ** e * Sdd
        else:
            m = self.m
            hm = _poly_dd(np.eye(m + 1)[m], w1, w2) if m else np.zeros_like(w1)
            Ldd = hm * np.log(w1) + w2 ** m * _log1p_ratio(d, w2)
            sing_dd = Ldd * S2 + w1 ** m * np.log(w1) * Sdd
        return -(Rdd + sing_dd)

    def value(self, z, w):
        out = np.empty_like(z)
        lo = w > 0.5
        if np.any(lo):
            zz = z[lo]
            out[lo] = zz * np.polynomial.polynomial.polyval(zz, self.p[:_nterms(float(np.max(zz)), self.N0)])
        if np.any(~lo):
            ww = w[~lo]
            N = _nterms(float(np.max(ww)), self.N1)
            reg = np.polynomial.polynomial.polyval(ww, self.R[:N])
            Sv = np.polynomial.polynomial.polyval(ww, self.S[:N])
            if self.log:
                out[~lo] = reg + ww ** self.m * np.log(ww) * Sv
            else:
                out[~lo] = reg + ww ** self.e * Sv
        return out


@lru_cache(maxsize=32)
def _chi(beta: float, gam: float) -> _Chi:
    return _Chi(beta, gam)


def _omega(x, a, gap):
    """1 - (a/x)^2 from the gap x - a without cancellation."""
    return gap * (2 * a + gap) / (x * x)


def ring_kernel(u, r, a: float, params: RieszParams, su=None, sr=None):
    """Symmetric kernel K(u, r), vectorised; u, r > a.

    su, sr optionally carry u - a and r - a exactly (nodes crowding the inner edge).
    The diagonal is the analytic limit, obtained from the same divided difference.
    """
    u = np.asarray(u, dtype=float)
    r = np.asarray(r, dtype=float)
    su = u - a if su is None else np.asarray(su, dtype=float)
    sr = r - a if sr is None else np.asarray(sr, dtype=float)
    u, r, su, sr = np.broadcast_arrays(u, r, su, sr)
    if np.any(su <= 0) or np.any(sr <= 0):
        raise DomainError("ring_kernel needs u > a and r > a")
    if a == 0.0:
        return np.zeros(u.shape)
    beta, gam, _, _ = _constants(params)
    chi = _chi(beta, gam)
    wu = _omega(u, a, su).ravel()
    wr = _omega(r, a, sr).ravel()
    w1 = np.maximum(wu, wr)  # larger radius, smaller zeta
    w2 = np.minimum(wu, wr)
    z1, z2 = 1.0 - w1, 1.0 - w2
    dd = np.empty_like(w1)
    small = z2 <= 0.75
    near = (w1 <= 0.5) & ~small
    far = ~small & ~near
    # bins by argument size, so each gets its own series length
    lo = 0.0
    for hi in (0.1, 0.3, 0.5, 0.75):
        sel = small & (z2 > lo) & (z2 <= hi) if lo else small & (z2 <= hi)
        if np.any(sel):
            dd[sel] = chi.dd_small(z1[sel], z2[sel])
        lo = hi
    lo = 0.0
    for hi in (0.05, 0.2, 0.5):
        sel = near & (w1 > lo) & (w1 <= hi) if lo else near & (w1 <= hi)
        if np.any(sel):
            dd[sel] = chi.dd_near_one(w1[sel], w2[sel])
        lo = hi
    if np.any(far):
        c1 = chi.value(z1[far], w1[far])
        c2 = chi.value(z2[far], w2[far])
        dd[far] = (c2 - c1) / (z2[far] - z1[far])
    out = a ** (2 * gam - 2) / ((u * r).ravel() ** 2) * dd
    return out.reshape(u.shape)


# ---------------------------------------------------------------------------
# right-hand sides


def ring_rhs(Q: RadialFunction | None, params: RieszParams, a: float, b: float, r, s=None):
    """(A(r), B(r)): coefficient of F_Q and the field term, before the factor kappa."""
    d, lam = params.d, params.lam
    beta, _, _, _ = _constants(params)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    s = r - a if s is None else np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s <= 0) or np.any(r > b):
        raise DomainError("ring_rhs needs a < r <= b")
    e = d + 2 * lam - 4
    D = s * (2 * a + s)
    A = beta * r ** e * incomplete_beta(D / (r * r), lam, (d - 1) / 2)
    if a > 0:
        A = A + a ** (d - 1) / r * D ** (lam - 1.0)
    if Q is None:
        return A, np.zeros_like(r)
    if Q.deriv1 is None:
        raise MissingDerivativeError("ring right-hand side needs Q'")
    return A, _field_term(Q, params, a, r, D)


def _field_moments(Q: RadialFunction, params: RieszParams, a: float, r, D, n: int = 96):
    """The two v-integrals making up the field term (rho^2 = a^2 + D v)."""
    d, lam = params.d, params.lam
    rr = r[:, None]
    if a > 0:
        v, wt = _jacobi01(n, 0.0, lam - 1.0)
        rho = np.sqrt(a * a + D[:, None] * v[None, :])
        i0 = (Q.eval(rho) * rho ** (d - 3)) @ wt
        dens = Q.deriv1(rho) * rho ** (d - 3) + (d - 3) * Q.eval(rho) * rho ** (d - 4)
        i1 = (dens * rr * v[None, :] / rho) @ wt
    else:
        # rho = r sqrt(v); the power v^((d-3)/2) sits in the weight
        v, wt = _jacobi01(n, (d - 3) / 2.0, lam - 1.0)
        rho = rr * np.sqrt(v)[None, :]
        i0 = (Q.eval(rho) * rr ** (d - 3)) @ wt
        i1 = (Q.deriv1(rho) * rr ** (d - 3) * np.sqrt(v)[None, :]
              + (d - 3) * Q.eval(rho) * rr ** (d - 4)) @ wt
    return i0, i1


def _field_term(Q: RadialFunction, params: RieszParams, a: float, r, D):
    """d/dr int_a^r Q(rho) rho^(d-2) (r^2 - rho^2)^(lam-1) d rho."""
    lam = params.lam
    i0, i1 = _field_moments(Q, params, a, r, D)
    return lam * r * D ** (lam - 1.0) * i0 + 0.5 * D ** lam * i1


def _rhs_over_P(Q, params: RieszParams, a: float, r, s):
    """(A/P, B/P) with the (r^2 - a^2)^(lam - 1) factors cancelled analytically."""
    d, lam = params.d, params.lam
    beta, _, _, _ = _constants(params)
    cst = 2 * math.sin(lam * math.pi) / math.pi
    e = d + 2 * lam - 4
    D = s * (2 * a + s)
    P = _P(params, a, r, s)
    At = beta * r ** e * incomplete_beta(D / (r * r), lam, (d - 1) / 2) / P
    if a > 0:
        At = At + a ** (d - 1) / (cst * r * r)
    if Q is None:
        return At, np.zeros_like(r)
    if Q.deriv1 is None:
        raise MissingDerivativeError("ring right-hand side needs Q'")
    i0, i1 = _field_moments(Q, params, a, r, D)
    return At, (lam * i0 + 0.5 * D * i1 / r) / cst


# ---------------------------------------------------------------------------
# Nystrom


@dataclass(frozen=True)
class _Grid:
    u: np.ndarray  # nodes
    s: np.ndarray  # u - a, exact
    W: np.ndarray  # weights including (u - a)^(lam - 1)
    Pt: np.ndarray  # P(u) / (u - a)^(lam - 1)


def _grid(params: RieszParams, a: float, b: float, n: int, k: int) -> _Grid:
    lam = params.lam
    L = b - a
    cst = 2 * math.sin(lam * math.pi) / math.pi
    if a > 0:
        tau, wt = _jacobi01(n, k * lam - 1.0, 0.0)
        s = L * tau ** k
        u = a + s
        W = L ** lam * k * wt
        Pt = cst * u * (u + a) ** (lam - 1.0)
    else:
        # P(u) = (2 sin(lam pi)/pi) u^(2 lam - 1)
        tau, wt = _jacobi01(n, 2 * lam - 1.0, 0.0)
        u = s = b * tau
        W = b ** (2 * lam) * wt
        Pt = np.full_like(u, cst)
    return _Grid(u, s, W, Pt)


def _P(params, a, r, s):
    lam = params.lam
    return 2 * math.sin(lam * math.pi) / math.pi * r * (r + a) ** (lam - 1.0) * s ** (lam - 1.0)


def nystrom_matrix(params: RieszParams, a: float, grid: _Grid) -> np.ndarray:
    _, _, c, _ = _constants(params)
    e = params.d + 2 * params.lam - 4
    u, s = grid.u, grid.s
    K = ring_kernel(u[None, :], u[:, None], a, params, s[None, :], s[:, None])
    # each row divided by P(u_i): the right-hand side stays O(1) at the inner edge
    M = c * K * (grid.W * grid.Pt)[None, :]
    M[np.diag_indices_from(M)] += u ** e / _P(params, a, u, s)
    return M


def nystrom_solve(M: np.ndarray, rhs: np.ndarray, max_condition: float = 1e12) -> np.ndarray:
    """Solve the dense system; refuse when the condition number is too large.

    Rows and columns are first scaled to unit max-norm; the condition number of
    the equilibrated matrix is the one that bounds the solve's error.
    """
    rs = 1.0 / np.max(np.abs(M), axis=1)
    Mr = M * rs[:, None]
    cs = 1.0 / np.max(np.abs(Mr), axis=0)
    Me = Mr * cs[None, :]
    cond = np.linalg.cond(Me)
    if not np.isfinite(cond) or cond > max_condition:
        raise IllConditionedError(f"Nystrom matrix condition number {cond:.3e} exceeds "
                                  f"{max_condition:.1e}")
    return cs * np.linalg.solve(Me, rs * rhs)


# ---------------------------------------------------------------------------
# solution object


@dataclass(frozen=True)
class RingSolution:
    params: RieszParams
    a: float
    b: float
    nodes: np.ndarray
    G_grid: np.ndarray
    F_Q: float
    r: np.ndarray
    f: np.ndarray
    edge_exponents: tuple
    residual_norm: float
    mass: float
    valid: bool
    config: NystromConfig
    G_parts: tuple = field(repr=False, default=())
    Q: RadialFunction | None = field(repr=False, default=None)
    density: RadialDensity | None = field(repr=False, default=None)

    @property
    def support(self) -> Support:
        return Support("ring", self.a, self.b)

    @property
    def C_Q(self) -> float:
        return float("nan")

    def G(self, r, s=None):
        """Nystrom interpolant of G at a < r <= b (s = r - a if known exactly)."""
        GA, GB = self.G_parts
        grid = _grid(self.params, self.a, self.b, self.config.n_nodes, self.config.grading)
        fn = lambda x, sx: (self.F_Q * _interp(self, GA, True, x, sx, grid)
                            - (_interp(self, GB, False, x, sx, grid) if self.Q is not None else 0.0))
        return _edge_guarded(fn, self.a, grid, r, s)

    def as_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "support": self.support.as_dict(),
            "F_Q": self.F_Q,
            "C_Q": None,
            "density": {"r": self.r.tolist(), "f": self.f.tolist(),
                        "edge_exponents": list(self.edge_exponents)},
            "G": {"r": self.nodes.tolist(), "G": self.G_grid.tolist()},
            "residual_norm": self.residual_norm,
            "mass": self.mass,
            "valid": self.valid,
        }


def _interp(sol: RingSolution, Gj, is_A, r, s, grid):
    """G(r) = r^-e [kappa rhs(r) - P(r) c sum_j W_j K(u_j, r) Pt_j G_j].

    is_A None: Gj = (G_A, G_B) and the result is G_A + i G_B from one kernel pass.
    """
    params, a, b = sol.params, sol.a, sol.b
    _, _, c, kappa = _constants(params)
    e = params.d + 2 * params.lam - 4
    r = np.atleast_1d(np.asarray(r, dtype=float))
    s = r - a if s is None else np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s <= 0) or np.any(r > b):
        raise DomainError("G is defined for a < r <= b")
    At, Bt = _rhs_over_P(sol.Q, params, a, r, s)
    if is_A is None:
        rhs = kappa * (At + 1j * Bt)
        Gj = Gj[0] + 1j * Gj[1]
    else:
        rhs = kappa * (At if is_A else Bt)
    K = ring_kernel(grid.u[None, :], r[:, None], a, params, grid.s[None, :], s[:, None])
    integral = K @ (grid.W * grid.Pt * Gj)
    return _P(params, a, r, s) / r ** e * (rhs - c * integral)


def _edge_guarded(fn, a, grid, r, s):
    """Evaluate the interpolant, but below the first node use G = alpha log s + beta.

    Closer to the inner edge than the first node the interpolant amplifies
    quadrature error by (r - a)^(lam - 1); G itself is only logarithmic there.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    s = r - a if s is None else np.atleast_1d(np.asarray(s, dtype=float))
    if a == 0.0:
        return fn(r, s)
    s1, s2 = grid.s[0], grid.s[1]
    inner = s < s1
    g1, g2 = fn(np.array([a + s1, a + s2]), np.array([s1, s2]))
    out = np.empty(r.shape, dtype=np.result_type(g1, float))
    if np.any(~inner):
        out[~inner] = fn(r[~inner], s[~inner])
    if np.any(inner):
        alpha = (g2 - g1) / math.log(s2 / s1)
        out[inner] = g1 + alpha * np.log(s[inner] / s1)
    return out


def _H_smooth(Gfun, params, a, t, st, b, n=160, m=None, extra=0):
    """H(t) / (b^2 - t^2)^lam, where H(t) = int_t^b G(r) r (r^2 - t^2)^(lam - 1) dr.

    r^2 = t^2 + (b^2 - t^2) tau^m keeps a log singularity of G at the inner edge mild;
    st = t - a.
    """
    lam = params.lam
    if m is None:
        # log singularity at tau = 0 when t = a: error ~ n^(-2 m lam)
        m = max(4, math.ceil(2.4 / lam)) + extra
    t = np.atleast_1d(np.asarray(t, dtype=float))
    st = np.atleast_1d(np.asarray(st, dtype=float))
    tau, wt = _jacobi01(n, m * lam - 1.0, 0.0)
    D = b * b - t * t
    r = np.sqrt(t[:, None] ** 2 + D[:, None] * tau[None, :] ** m)
    gap = (st[:, None] * (t[:, None] + a) + D[:, None] * tau[None, :] ** m) / (r + a)
    vals = Gfun(r.ravel(), gap.ravel()).reshape(r.shape)
    return 0.5 * m * (vals @ wt)


def _mass_from_G(Gfun, params: RieszParams, a: float, b: float, n: int = 96,
                 n_inner: int = 160, extra_grading: int = 0) -> float:
    """int_a^b f t^(d-2) dt = k (a^(d-3) H(a) + (d-3) int_a^b t^(d-4) H dt), no derivative of G."""
    d, lam = params.d, params.lam
    total = 0.0
    if a > 0 or d == 3:
        J = _H_smooth(Gfun, params, a, a, 0.0, b, n_inner, extra=extra_grading)
        total += a ** (d - 3) * (b * b - a * a) ** lam * J[0]
    if d > 3:
        # t = a + (b - a) x, x = y^q; with q = 1/lam the inner-edge term H ~ c (t - a)^lam
        # is linear in y.  (b^2 - t^2)^lam = ((b - a)(1 - y) S)^lam (b + t)^lam, S = (1 - y^q)/(1 - y)
        q = 1.0 / lam if a > 0 else 1.0
        y, wt = _jacobi01(n, q - 1.0, lam)
        x = y ** q
        t = a + (b - a) * x
        J = _H_smooth(Gfun, params, a, t, (b - a) * x, b, n_inner, extra=extra_grading)
        S = -np.expm1(q * np.log(y)) / (1.0 - y)
        total += (d - 3) * q * (b - a) ** (1 + lam) * (
            (t ** (d - 4) * (b + t) ** lam * S ** lam * J) @ wt)
    return 2 * math.sin(lam * math.pi) / math.pi * total


def _G_radial(Gfun, a, b, n=400, k=4) -> RadialFunction:
    """Natural cubic spline of G in r, with its derivative (a = 0: G is smooth)."""
    tau = (np.arange(1, n + 1) - 0.5) / n
    gap = np.append((b - a) * tau ** k, b - a)
    r = a + gap
    spl = CubicSpline(r, Gfun(r, gap), bc_type="natural")
    return RadialFunction(spl, spl.derivative(1), None, a, b)


def _G_log_spline(Gfun, a, b, n=400, k=4):
    """G and dG/dr as functions of the gap r - a, via a natural spline in log(r - a).

    G ~ alpha log(r - a) + beta at the inner edge is nearly linear in the log,
    which the natural end matches; below the first knot it is extended linearly.
    """
    tau = (np.arange(1, n + 1) - 0.5) / n
    gap = np.append((b - a) * tau ** k, b - a)
    x = np.log(gap)
    spl = CubicSpline(x, Gfun(a + gap, gap), bc_type="natural")
    ds = spl.derivative(1)
    x0, g0, d0 = x[0], float(spl(x[0])), float(ds(x[0]))

    def G(sg):
        y = np.log(sg)
        return np.where(y < x0, g0 + d0 * (y - x0), spl(np.maximum(y, x0)))

    def dG(sg):
        y = np.log(sg)
        return np.where(y < x0, d0, ds(np.maximum(y, x0))) / sg

    return G, dG


def _abel_ring(G, dG, params: RieszParams, a, b, t, st, n=12):
    """Abel inversion at t = a + st for G with a log singularity at a.

    The G' integrand has a layer of width w0 = 2 t st / D at w = 0 (rho^2 = t^2 + D w):
    a Jacobi panel on [0, w0], then Legendre panels doubling in length.
    """
    lam = params.lam
    D = b * b - t * t
    w0 = min(1.0, 2.0 * t * st / D)
    xj, wj = _jacobi01(n, lam - 1.0, 0.0)
    xl, wl = np.polynomial.legendre.leggauss(n)
    ws, wts = [w0 * xj], [w0 ** lam * wj]
    lo = w0
    while lo < 1.0:
        hi = min(1.0, 2.0 * lo)
        w = lo + 0.5 * (hi - lo) * (xl + 1.0)
        ws.append(w)
        wts.append(0.5 * (hi - lo) * wl * w ** (lam - 1.0))
        lo = hi
    w = np.concatenate(ws)
    wt = np.concatenate(wts)
    rho = np.sqrt(t * t + D * w)
    sg = st + D * w / (rho + t)
    j0 = wt @ G(sg)
    j1 = wt @ ((1.0 - w) * dG(sg) / rho)
    return -2.0 * math.sin(lam * math.pi) / math.pi * (-lam * D ** (lam - 1.0) * j0
                                                        + 0.5 * D ** lam * j1)


def recover_density(Gfun, params: RieszParams, a: float, b: float, t) -> np.ndarray:
    """f(t) = -(2 sin(lam pi)/pi) (1/t) d/dt int_t^b G(r) r (r^2-t^2)^(lam-1) dr."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if a == 0.0:
        Gs = _G_radial(Gfun, a, b)
        return np.array([abel_invert(Gs, params, float(x), b, rel_tol=1e-10) for x in t])
    G, dG = _G_log_spline(Gfun, a, b)
    return np.array([_abel_ring(G, dG, params, a, b, float(x), float(x - a)) for x in t])


def ring_grid(a: float, b: float, n: int) -> np.ndarray:
    """Sample radii strictly inside (a, b), clustered at both edges."""
    x = 0.5 * (1.0 - np.cos(np.pi * (np.arange(n) + 0.5) / n))
    return a + (b - a) * x


def ring_solve(Q: RadialFunction | None, params: RieszParams, a: float, b: float,
               config: NystromConfig = NystromConfig(), grid_n: int = 64) -> RingSolution:
    """Solve for G, fix F_Q by the unit-mass condition and recover f."""
    if not 0.0 <= a < b <= 1.0:
        raise ValueError("ring needs 0 <= a < b <= 1")
    grid = _grid(params, a, b, config.n_nodes, config.grading)
    _, _, _, kappa = _constants(params)
    M = nystrom_matrix(params, a, grid)
    At, Bt = _rhs_over_P(Q, params, a, grid.u, grid.s)
    GA = nystrom_solve(M, kappa * At, config.max_condition)
    GB = nystrom_solve(M, kappa * Bt, config.max_condition)

    # F_Q enters linearly: G = F_Q G_A - G_B
    part = RingSolution(params, a, b, grid.u, GA, 1.0, np.empty(0), np.empty(0),
                        (params.lam - 1.0, params.lam - 1.0), 0.0, 0.0, True, config,
                        (GA, GB), Q)
    # mass is linear in G: real part from G_A, imaginary part from G_B
    gAB = lambda r, s: _edge_guarded(lambda x, sx: _interp(part, (GA, GB), None, x, sx, grid),
                                      a, grid, r, s)
    m = _mass_from_G(gAB, params, a, b)
    mA, mB = float(np.real(m)), float(np.imag(m))
    if abs(mA) < 1e-14:
        raise DegenerateMassError("F_Q coefficient carries no mass")
    F_Q = (1.0 / params.sphere_area + mB) / mA

    sol = replace(part, G_grid=F_Q * GA - GB, F_Q=F_Q)
    r = ring_grid(a, b, grid_n)
    f = recover_density(sol.G, params, a, b, r)
    # smooth factor of f in Chebyshev form, for potential evaluation by the oracle
    ex = params.lam - 1.0
    a2, b2 = a * a, b * b
    smooth = lambda t: (recover_density(sol.G, params, a, b, t)
                        / ((b2 - t * t) ** ex * ((t * t - a2) ** ex if a > 0 else 1.0)))
    density = chebyshev_density(smooth, a, b, ex, ex if a > 0 else 0.0, deg=64, grading=2)
    # mass check with a finer, more strongly graded rule than the one that fixed F_Q
    mass = params.sphere_area * _mass_from_G(sol.G, params, a, b, 120, 240, 2)
    return replace(sol, r=r, f=f, residual_norm=ring_residual(sol), mass=mass,
                   density=density, valid=bool(np.min(f) >= -1e-9))


def ring_residual(sol: RingSolution, n_points: int = 50) -> float:
    """Max |residual| / |F_Q| of the continuous equation at off-node points.

    The Nystrom interpolant is fed back through a rule with twice the nodes.
    """
    params, a, b = sol.params, sol.a, sol.b
    _, _, c, kappa = _constants(params)
    e = params.d + 2 * params.lam - 4
    fine = _grid(params, a, b, 2 * sol.config.n_nodes, sol.config.grading)
    Gf = sol.G(fine.u, fine.s)
    r = ring_grid(a, b, n_points + 2)[1:-1]
    A, B = ring_rhs(sol.Q, params, a, b, r)
    K = ring_kernel(fine.u[None, :], r[:, None], a, params, fine.s[None, :])
    lhs = r ** e * sol.G(r) + _P(params, a, r, r - a) * c * (K @ (fine.W * fine.Pt * Gf))
    res = (lhs - kappa * (sol.F_Q * A - B)) / r ** e
    return float(np.max(np.abs(res)) / abs(sol.F_Q))
