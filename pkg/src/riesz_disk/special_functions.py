"""Gamma, Beta, Pochhammer, incomplete Beta and the Gauss hypergeometric 2F1.

All routines work on the real axis.  ``hyp2f1`` is vectorised over ``z``;
the scalar entry point ``gauss_2f1`` mirrors the record-style interface.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


class ConvergenceError(RuntimeError):
    """A series did not reach the requested tolerance within max_terms."""


@dataclass(frozen=True)
class AccuracyPolicy:
    rel_tol: float = 1e-13
    max_terms: int = 10000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


@dataclass(frozen=True)
class HypergeometricArgs:
    a: float
    b: float
    c: float
    z: float


DEFAULT_POLICY = AccuracyPolicy()
_INT_TOL = 1e-12


def _is_nonpos_int(x: float) -> bool:
    return x <= 0 and abs(x - round(x)) < _INT_TOL


def _near_int(x: float) -> bool:
    return abs(x - round(x)) < _INT_TOL


def gamma_fn(x: float) -> float:
    """Gamma function; reflection formula below 1/2."""
    x = float(x)
    if _is_nonpos_int(x):
        raise DomainError(f"Gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * math.gamma(1.0 - x))
    return math.gamma(x)


def rgamma(x: float) -> float:
    """Reciprocal Gamma, zero at the poles."""
    if _is_nonpos_int(x):
        return 0.0
    return 1.0 / gamma_fn(x)


def digamma(x: float) -> float:
    """Psi function via upward recurrence and the asymptotic series."""
    x = float(x)
    if _is_nonpos_int(x):
        raise DomainError(f"digamma has a pole at {x}")
    if x < 0.5:
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    # Bernoulli tail
    tail = inv2 * (1 / 12 - inv2 * (1 / 120 - inv2 * (1 / 252 - inv2 * (1 / 240 - inv2 / 132))))
    return acc + math.log(x) - 0.5 / x - tail


def pochhammer(a: float, n: int) -> float:
    if n < 0:
        raise ValueError("n must be non-negative")
    out = 1.0
    for k in range(n):
        out *= a + k
    return out


def beta_fn(a: float, b: float) -> float:
    if a <= 0 or b <= 0:
        raise DomainError("beta_fn needs a > 0 and b > 0")
    if a + b > 170:
        return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))
    return math.gamma(a) * math.gamma(b) / math.gamma(a + b)


# ---------------------------------------------------------------------------
# 2F1 building blocks (vectorised over z)


def _series(a, b, c, z, policy):
    z = np.asarray(z, dtype=float)
    total = np.ones_like(z)
    term = np.ones_like(z)
    quiet = 0
    for n in range(policy.max_terms):
        term = term * ((a + n) * (b + n) / ((c + n) * (n + 1.0))) * z
        total = total + term
        small = np.all(np.abs(term) <= policy.rel_tol * np.abs(total))
        quiet = quiet + 1 if small else 0
        if quiet >= 2:
            return total
    raise ConvergenceError(f"2F1({a},{b};{c};z) series did not converge")


def _terminating(a, b, c, z):
    # a is a non-positive integer
    z = np.asarray(z, dtype=float)
    nmax = int(round(-a))
    total = np.ones_like(z)
    term = np.ones_like(z)
    for n in range(nmax):
        if c + n == 0:
            raise DomainError("2F1 denominator vanishes before the series terminates")
        term = term * ((a + n) * (b + n) / ((c + n) * (n + 1.0))) * z
        total = total + term
    return total


def _one_minus_z(a, b, c, w, policy):
    """2F1(a,b;c;1-w) for 0 < w <= 1/2 (connection formula about z = 1)."""
    w = np.asarray(w, dtype=float)
    e = c - a - b
    if _near_int(e):
        m = int(round(e))
        if m < 0:
            # Euler transformation swaps to a positive integer offset
            return w ** m * _one_minus_z(c - a, c - b, c, w, policy)
        return _log_case(a, b, m, w, policy)
    g1 = gamma_fn(c) * gamma_fn(e) * rgamma(c - a) * rgamma(c - b)
    g2 = gamma_fn(c) * gamma_fn(-e) * rgamma(a) * rgamma(b)
    t1 = np.zeros_like(w)
    t2 = np.zeros_like(w)
    if g1 != 0.0:
        t1 = g1 * _hyp_core(a, b, 1.0 - e, w, policy)
    if g2 != 0.0:
        t2 = g2 * w ** e * _hyp_core(c - a, c - b, 1.0 + e, w, policy)
    out = t1 + t2
    # the two branches can cancel for large parameters; the direct series
    # is still usable away from z = 1
    bad = (np.abs(out) < 1e-3 * np.maximum(np.abs(t1), np.abs(t2))) & (w >= 0.1)
    if np.any(bad):
        out[bad] = _series(a, b, c, 1.0 - w[bad], policy)
    return out


def hyp2f1_branches(a, b, c, w, policy: AccuracyPolicy = DEFAULT_POLICY):
    """Split 2F1(a,b;c;1-w) = t1(w) + w^(c-a-b) t2(w), both analytic at w = 0.

    Needs non-integer c - a - b and 0 <= w <= 1/2.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    e = c - a - b
    if _near_int(e):
        raise DomainError("branch split needs non-integer c - a - b")
    if np.any(w < 0) or np.any(w > 0.5):
        raise DomainError("branch split needs 0 <= w <= 1/2")
    g1 = gamma_fn(c) * gamma_fn(e) * rgamma(c - a) * rgamma(c - b)
    g2 = gamma_fn(c) * gamma_fn(-e) * rgamma(a) * rgamma(b)
    t1 = g1 * _hyp_core(a, b, 1.0 - e, w, policy) if g1 else np.zeros_like(w)
    t2 = g2 * _hyp_core(c - a, c - b, 1.0 + e, w, policy) if g2 else np.zeros_like(w)
    return t1, t2


def _log_case(a, b, m, w, policy):
    """c = a + b + m with integer m >= 0; logarithmic connection formula."""
    c = a + b + m
    out = np.zeros_like(w)
    if m > 0:
        pre = gamma_fn(m) * gamma_fn(c) * rgamma(a + m) * rgamma(b + m)
        term = np.ones_like(w)
        acc = np.ones_like(w)
        for n in range(1, m):
            term = term * ((a + n - 1) * (b + n - 1) / (n * (n - m))) * w
            acc = acc + term
        out = out + pre * acc
    pre = -((-1) ** m) * gamma_fn(c) * rgamma(a) * rgamma(b)
    if pre == 0.0:
        return out
    lw = np.log(w)
    psi1 = digamma(1.0)
    psim = digamma(m + 1.0)
    psia = digamma(a + m)
    psib = digamma(b + m)
    coef = 1.0 / math.factorial(m)
    term = coef * np.ones_like(w)
    total = term * (lw - psi1 - psim + psia + psib)
    quiet = 0
    for n in range(policy.max_terms):
        psi1 += 1.0 / (n + 1)
        psim += 1.0 / (n + m + 1)
        psia += 1.0 / (a + n + m)
        psib += 1.0 / (b + n + m)
        term = term * ((a + m + n) * (b + m + n) / ((n + 1.0) * (n + m + 1.0))) * w
        piece = term * (lw - psi1 - psim + psia + psib)
        total = total + piece
        small = np.all(np.abs(piece) <= policy.rel_tol * np.abs(total))
        quiet = quiet + 1 if small else 0
        if quiet >= 2:
            return out + pre * w ** m * total
    raise ConvergenceError("logarithmic 2F1 series did not converge")


def _hyp_core(a, b, c, z, policy, w=None):
    """Dispatch on z for arrays; ``w`` optionally carries 1 - z exactly."""
    z = np.asarray(z, dtype=float)
    if _is_nonpos_int(a):
        return _terminating(round(a), b, c, z)
    if _is_nonpos_int(b):
        return _terminating(round(b), a, c, z)
    if _is_nonpos_int(c):
        raise DomainError(f"2F1 undefined for c = {c}")
    if w is None:
        w = 1.0 - z
    w = np.asarray(w, dtype=float)
    if np.any(z > 1.0) or np.any(w < 0.0):
        raise DomainError("2F1 evaluated for z > 1")
    out = np.empty_like(z)
    direct = np.abs(z) <= 0.5
    near = (z > 0.5) & (w > 0.0)
    unit = w == 0.0
    neg = z < -0.5
    if np.any(direct):
        out[direct] = _series(a, b, c, z[direct], policy)
    if np.any(near):
        out[near] = _one_minus_z(a, b, c, w[near], policy)
    if np.any(unit):
        e = c - a - b
        if e <= 0:
            raise DomainError("2F1 diverges at z = 1 when c - a - b <= 0")
        out[unit] = gamma_fn(c) * gamma_fn(e) * rgamma(c - a) * rgamma(c - b)
    if np.any(neg):
        zn = z[neg]
        # Pfaff: z -> z/(z-1) lands in (1/3, 1); its complement is 1/(1-z)
        zt = zn / (zn - 1.0)
        wt = 1.0 / (1.0 - zn)
        out[neg] = wt ** a * _hyp_core(a, c - b, c, zt, policy, w=wt)
    return out


def hyp2f1(a, b, c, z, policy: AccuracyPolicy = DEFAULT_POLICY, w=None):
    """Gauss hypergeometric function, vectorised over z (real, z <= 1).

    ``w`` may pass 1 - z directly when it is known more accurately than
    ``1 - z`` rounds to (kernels near their diagonal).
    """
    zz = np.asarray(z, dtype=float)
    scalar = zz.ndim == 0
    zz = np.atleast_1d(zz)
    ww = None if w is None else np.atleast_1d(np.asarray(w, dtype=float))
    out = _hyp_core(float(a), float(b), float(c), zz, policy, w=ww)
    return float(out[0]) if scalar else out


def gauss_2f1(args: HypergeometricArgs, policy: AccuracyPolicy = DEFAULT_POLICY) -> float:
    return hyp2f1(args.a, args.b, args.c, args.z, policy)


def incomplete_beta(z, a: float, b: float, policy: AccuracyPolicy = DEFAULT_POLICY):
    """B(z; a, b) = int_0^z t^(a-1) (1-t)^(b-1) dt, vectorised over z.

    b <= 0 is accepted for z < 1, where the integral still converges.
    """
    zz = np.asarray(z, dtype=float)
    scalar = zz.ndim == 0
    zz = np.atleast_1d(zz)
    if a <= 0:
        raise DomainError("incomplete_beta needs a > 0")
    if np.any(zz < 0) or np.any(zz > 1):
        raise DomainError("incomplete_beta needs 0 <= z <= 1")
    if b <= 0 and np.any(zz >= 1):
        raise DomainError("incomplete_beta diverges at z = 1 for b <= 0")
    out = np.empty_like(zz)
    upper = (zz > 0.5) & (b > 0)
    lower = ~upper
    if np.any(lower):
        zl = zz[lower]
        out[lower] = zl ** a / a * hyp2f1(a, 1.0 - b, a + 1.0, zl, policy)
    if np.any(upper):
        wu = 1.0 - zz[upper]
        full = beta_fn(a, b)
        out[upper] = full - wu ** b / b * hyp2f1(b, 1.0 - a, b + 1.0, wu, policy)
    return float(out[0]) if scalar else out
