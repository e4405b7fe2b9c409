"""External fields and their closed-form extremal densities."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .disk_solver import CQ_to_FQ, _density_constant
from .radial_calculus import RadialFunction, RieszParams, tabulated_field
from .special_functions import beta_fn, gamma_fn, hyp2f1, incomplete_beta, pochhammer


# ---------------------------------------------------------------------------
# field value types


@dataclass(frozen=True)
class ZeroField:
    def radial(self, params: RieszParams | None = None) -> RadialFunction:
        z = lambda r: np.zeros_like(np.asarray(r, dtype=float))
        return RadialFunction(z, z, z)


@dataclass(frozen=True)
class MonomialField:
    q: float
    alpha: float

    def __post_init__(self):
        if not self.q > 0:
            raise ValueError("monomial field needs q > 0")
        if not self.alpha >= 1:
            raise ValueError("monomial field needs alpha >= 1")

    def radial(self, params: RieszParams | None = None) -> RadialFunction:
        q, a = self.q, self.alpha
        return RadialFunction(
            lambda r: q * np.asarray(r, dtype=float) ** a,
            lambda r: q * a * np.asarray(r, dtype=float) ** (a - 1),
            lambda r: q * a * (a - 1) * np.asarray(r, dtype=float) ** (a - 2)
            if a != 1 else np.zeros_like(np.asarray(r, dtype=float)))


@dataclass(frozen=True)
class PointChargeField:
    """Q = q / (r^2 + h^2)^(s/2): a charge q at height h on the polar axis."""

    q: float
    h: float

    def __post_init__(self):
        if not self.q > 0:
            raise ValueError("point charge needs q > 0")
        if not self.h > 0:
            raise ValueError("point charge needs h > 0")

    def radial(self, params: RieszParams) -> RadialFunction:
        q, h2, s = self.q, self.h ** 2, params.s

        def ev(r):
            return q * (np.asarray(r, dtype=float) ** 2 + h2) ** (-s / 2)

        def d1(r):
            r = np.asarray(r, dtype=float)
            return -q * s * r * (r * r + h2) ** (-s / 2 - 1)

        def d2(r):
            r = np.asarray(r, dtype=float)
            u = r * r + h2
            return q * s * u ** (-s / 2 - 2) * ((s + 1) * r * r - h2)

        return RadialFunction(ev, d1, d2)


@dataclass(frozen=True)
class TableField:
    path: str

    def radial(self, params: RieszParams | None = None) -> RadialFunction:
        data = np.genfromtxt(self.path, delimiter=",", names=True)
        return tabulated_field(data["r"], data["Q"])


def parse_field(spec: str):
    """Parse ``zero``, ``monomial:q=..,alpha=..``, ``point:q=..,h=..``, ``table:path``."""
    spec = spec.strip()
    if spec == "zero":
        return ZeroField()
    kind, _, rest = spec.partition(":")
    if kind == "table":
        if not rest:
            raise ValueError("table field needs a path")
        return TableField(rest)
    try:
        kv = dict(item.split("=", 1) for item in rest.split(",") if item)
        kv = {k.strip(): float(v) for k, v in kv.items()}
    except ValueError as exc:
        raise ValueError(f"cannot parse field spec {spec!r}") from exc
    if kind == "monomial" and set(kv) == {"q", "alpha"}:
        return MonomialField(kv["q"], kv["alpha"])
    if kind == "point" and set(kv) == {"q", "h"}:
        return PointChargeField(kv["q"], kv["h"])
    raise ValueError(f"unknown field spec {spec!r}")


# ---------------------------------------------------------------------------
# monomial closed forms


def monomial_radius_formula(field: MonomialField, params: RieszParams) -> float:
    d, lam, q, a = params.d, params.lam, field.q, field.alpha
    num = params.s * math.pi * gamma_fn((d + a + 2 * lam - 1) / 2)
    den = q * a * math.sin(lam * math.pi) * gamma_fn(lam) * gamma_fn((d + a - 1) / 2)
    return (num / den) ** (1.0 / (d + a + 2 * lam - 3))


def monomial_support_radius(field: MonomialField, params: RieszParams) -> float:
    return min(monomial_radius_formula(field, params), 1.0)


def monomial_g(field: MonomialField, params: RieszParams, r):
    d, lam, q, a = params.d, params.lam, field.q, field.alpha
    k = q * (d + 2 * lam + a - 3) * gamma_fn(lam) * gamma_fn((d + a - 1) / 2) / (
        2.0 * gamma_fn((d + a - 1) / 2 + lam))
    return k * np.asarray(r, dtype=float) ** a


def monomial_F(field: MonomialField, params: RieszParams, R: float, r):
    d, lam, q, a = params.d, params.lam, field.q, field.alpha
    r = np.asarray(r, dtype=float)
    x = 1.0 - (r / R) ** 2
    pre = (q * math.sin(lam * math.pi) * gamma_fn((d + a - 1) / 2) * gamma_fn((d + 2 * lam - 3) / 2)
           / (math.pi ** ((d + 1) / 2) * gamma_fn((d + a + 2 * lam - 3) / 2)))
    bracket = (-hyp2f1(-a / 2, 1.0, lam + 1.0, x)
               + a / (2 * lam * (lam + 1)) * x * hyp2f1(1 - a / 2, 2.0, lam + 2.0, x))
    return pre * R ** a * (R * R - r * r) ** (lam - 1.0) * bracket


def monomial_CQ(field: MonomialField, params: RieszParams, R: float) -> float:
    d, lam, q, a = params.d, params.lam, field.q, field.alpha
    return _density_constant(params) * (
        R ** (-params.s)
        + q * math.sin(lam * math.pi) * gamma_fn((d + a - 1) / 2) * gamma_fn(lam)
        / (math.pi * gamma_fn((d + a + 2 * lam - 1) / 2)) * R ** a)


def monomial_density(field: MonomialField, params: RieszParams, R_star: float, r):
    r = np.asarray(r, dtype=float)
    if np.any(r >= R_star):
        raise ValueError("monomial_density needs r < R_star")
    lam = params.lam
    return (monomial_CQ(field, params, R_star) * (R_star ** 2 - r * r) ** (lam - 1.0)
            + monomial_F(field, params, R_star, r))


# ---------------------------------------------------------------------------
# point charge closed forms (full unit disk)


def _pc_common(params: RieszParams):
    d, lam = params.d, params.lam
    kappa = math.sin(lam * math.pi) * gamma_fn((d - 1) / 2) / math.pi ** ((d + 1) / 2)
    bb = (d - 2 * lam - 1) / 2.0
    return kappa, bb


def _ibeta_term(z, lam, bb):
    if bb == 0.0:
        return np.zeros_like(np.asarray(z, dtype=float))
    return bb * incomplete_beta(z, lam, bb)


def point_charge_F(field: PointChargeField, params: RieszParams, r):
    d, lam = params.d, params.lam
    q, h = field.q, field.h
    r = np.asarray(r, dtype=float)
    kappa, bb = _pc_common(params)
    h2 = h * h
    z = (1.0 - r * r) / (1.0 + h2)
    term1 = (h2 + r * r) ** (-(d - 2 * lam + 1) / 2) * _ibeta_term(z, lam, bb)
    term2 = (1.0 - r * r) ** (lam - 1.0) / ((1.0 + h2) ** ((d - 3) / 2) * (h2 + r * r))
    return -q * kappa * h ** (2 * (1 - lam)) * (term1 + term2)


def point_charge_c(field: PointChargeField, params: RieszParams) -> float:
    """c_{d,lam} = -(1/q) int_0^1 F(t) t^(d-2) dt, inner integral by adaptive quadrature."""
    d, lam, h = params.d, params.lam, field.h
    kappa, bb = _pc_common(params)
    h2 = h * h
    if bb != 0.0:
        inner, _ = quad(lambda t: t ** (d - 2) * (h2 + t * t) ** (-(d - 2 * lam + 1) / 2)
                        * _ibeta_term((1 - t * t) / (1 + h2), lam, bb),
                        0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
    else:
        inner = 0.0
    closed = (gamma_fn(lam) * gamma_fn((d - 1) / 2) / (2 * gamma_fn((d - 1) / 2 + lam))
              * (1 + h2) ** (-(d - 1) / 2)
              * hyp2f1(1.0, lam, (d + 2 * lam - 1) / 2, 1.0 / (1.0 + h2)))
    return kappa * h ** (2 * (1 - lam)) * (inner + closed)


def point_charge_CQ(field: PointChargeField, params: RieszParams) -> float:
    d, lam = params.d, params.lam
    k = 2.0 * gamma_fn((d - 1) / 2 + lam) / (gamma_fn(lam) * gamma_fn((d - 1) / 2))
    return k * (gamma_fn((d - 1) / 2) / (2 * math.pi ** ((d - 1) / 2))
                + field.q * point_charge_c(field, params))


def point_charge_FQ(field: PointChargeField, params: RieszParams) -> float:
    return point_charge_CQ(field, params) * CQ_to_FQ(params)


def point_charge_density(field: PointChargeField, params: RieszParams, r, CQ=None):
    r = np.asarray(r, dtype=float)
    if CQ is None:
        CQ = point_charge_CQ(field, params)
    return CQ * (1.0 - r * r) ** (params.lam - 1.0) + point_charge_F(field, params, r)


def h_minus(field: PointChargeField | float, params: RieszParams) -> float:
    """Height above which the candidate density is increasing in r."""
    q = field.q if hasattr(field, "q") else float(field)
    d, lam = params.d, params.lam
    inner = (q * ((1 - lam) * (d - 2 * lam + 1) + 1) ** 2 * math.sin(lam * math.pi)
             / (8 * math.pi * (d + 2 * lam - 1) * (1 - lam)) * beta_fn(lam, (d - 1) / 2))
    return inner ** (1.0 / params.s)


def p_of_h(field: PointChargeField | float, params: RieszParams, h: float) -> float:
    """Candidate density at the origin for a charge at height h."""
    q = field.q if hasattr(field, "q") else float(field)
    d, lam = params.d, params.lam
    kappa, bb = _pc_common(params)
    pc = PointChargeField(q, h)
    tail = (bb * h ** (-(d - 1)) * incomplete_beta(1.0 / (1.0 + h * h), lam, bb) if bb else 0.0)
    tail += 1.0 / (h ** (2 * lam) * (1 + h * h) ** ((d - 3) / 2))
    return point_charge_CQ(pc, params) - q * kappa * tail


def p_limit_large_h(params: RieszParams) -> float:
    d, lam = params.d, params.lam
    return gamma_fn((d - 1) / 2 + lam) / (math.pi ** ((d - 1) / 2) * gamma_fn(lam))


class NoRootError(RuntimeError):
    def __init__(self, msg, h_minus_value=None):
        super().__init__(msg)
        self.h_minus = h_minus_value


def _bisect(fn, lo, hi, tol=1e-12, max_iter=200):
    flo = fn(lo)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def p_sign_changes(p, lo=1e-3, hi=1e3, n=241):
    """Brackets [h_i, h_{i+1}] of every sign change of p on a log grid."""
    hs = np.geomspace(lo, hi, n)
    vals = np.array([p(h) for h in hs])
    idx = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    return [(hs[i], hs[i + 1]) for i in idx]


def h_plus_candidates(field: PointChargeField | float, params: RieszParams, p=None):
    """All roots of p found on the scan grid, in increasing order."""
    if p is None:
        p = lambda h: p_of_h(field, params, h)
    return [_bisect(p, lo, hi) for lo, hi in p_sign_changes(p)]


def h_plus(field: PointChargeField | float, params: RieszParams, p=None) -> float:
    roots = h_plus_candidates(field, params, p)
    if not roots:
        raise NoRootError("p(h) has no sign change on [1e-3, 1e3]",
                          h_minus(field, params))
    return roots[-1]


# ---------------------------------------------------------------------------
# d = 3, lam = 1/2 elementary forms


def coulomb3d_p(h: float, q: float = 1.0) -> float:
    at = math.atan(1.0 / h)
    return ((1 + q * 2 * h * at / (math.pi * math.sqrt(1 + h * h))) / (2 * math.pi)
            - q / (math.pi ** 2 * h) - q * at / (math.pi ** 2 * h * h))


def coulomb3d_density(q: float, h: float, r):
    r = np.asarray(r, dtype=float)
    h2 = h * h
    at = math.atan(1.0 / h)
    u = h2 + r * r
    root = np.sqrt(1 - r * r)
    base = (1 + q * 2 * h * at / (math.pi * math.sqrt(1 + h2))) / (2 * math.pi)
    return (base / root - q * h / (math.pi ** 2 * u * root)
            - q * h / math.pi ** 2 * u ** -1.5 * np.arctan(np.sqrt((1 - r * r) / u)))


# ---------------------------------------------------------------------------
# d = 2m + 4, lam = 1/2 finite sums


def _newton_check(m: int):
    if int(m) != m or m < 2:
        raise ValueError("m must be an integer >= 2")
    return int(m)


def newtonian_c(m: int, q: float, h: float) -> float:
    m = _newton_check(m)
    g = gamma_fn(m + 1.5)
    H = 1.0 + h * h
    sH = math.sqrt(H)
    outer = 0.0
    for n in range(m + 1):
        inner = sum(pochhammer(2 - m, l) * gamma_fn(n + l + 1.5)
                    / math.factorial(n + m + l + 2) * H ** (-l) for l in range(m - 1))
        outer += pochhammer(-m, n) / ((2 * n + 1) * math.factorial(n)) * H ** (-n) * inner
    ratio = (sH - h) / (sH + h)
    second = sum(pochhammer(-m, n) / math.factorial(m + n + 1) * ratio ** n for n in range(m + 1))
    return (g * g / math.pi ** (m + 2.5) * h * H ** (-(m + 1))
            * (g * H ** (-(m + 2.5)) * outer + sH / (h + sH) * second))


def newtonian_CQ(m: int, q: float, h: float) -> float:
    m = _newton_check(m)
    g = gamma_fn(m + 1.5)
    return 2 * math.factorial(m + 1) / (math.sqrt(math.pi) * g) * (
        g / (2 * math.pi ** (m + 1.5)) + q * newtonian_c(m, q, h))


def newtonian_F(m: int, q: float, h: float, r):
    m = _newton_check(m)
    r = np.asarray(r, dtype=float)
    g = gamma_fn(m + 1.5)
    H = 1.0 + h * h
    u = h * h + r * r
    x = (1 - r * r) / H
    total = sum(pochhammer(-m, n) / ((2 * n + 1) * math.factorial(n)) * x ** (n + 0.5)
                for n in range(m + 1))
    return -q * h * g / math.pi ** (m + 2.5) * (
        2 * (m + 1) / u ** (m + 2) * total + 1.0 / (np.sqrt(1 - r * r) * u * H ** (m + 0.5)))


def newtonian_density(m: int, q: float, h: float, r):
    r = np.asarray(r, dtype=float)
    return newtonian_CQ(m, q, h) / np.sqrt(1 - r * r) + newtonian_F(m, q, h, r)


def newtonian_p(m: int, q: float, h: float) -> float:
    m = _newton_check(m)
    g = gamma_fn(m + 1.5)
    H = 1.0 + h * h
    total = sum(pochhammer(-m, n) / ((2 * n + 1) * math.factorial(n)) * H ** (-(n + 0.5))
                for n in range(m + 1))
    return newtonian_CQ(m, q, h) - q * g / math.pi ** (m + 2.5) * (
        2 * (m + 1) * h ** (-(2 * m + 3)) * total + 1.0 / (h * H ** (m + 0.5)))


def newtonian_h_minus(m: int, q: float) -> float:
    """h_- specialised to lam = 1/2, d = 2m + 4."""
    m = _newton_check(m)
    return (q * (m + 3) ** 2 * gamma_fn(m + 1.5)
            / (8 * math.sqrt(math.pi) * (m + 2) * math.factorial(m + 1))) ** (1.0 / (2 * (m + 1)))


def newtonian_h_minus_printed(m: int, q: float) -> float:
    """Alternative closed form for the even-dimension h_-; disagrees with h_minus, kept for comparison."""
    m = _newton_check(m)
    return (q * (m + 2) * gamma_fn(m + 1.5)
            / (8 * math.sqrt(math.pi) * math.factorial(m + 1))) ** (1.0 / (2 * (m + 1)))
