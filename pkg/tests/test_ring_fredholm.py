import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riesz_disk import fields as F
from riesz_disk.potential_oracle import verify
from riesz_disk.radial_calculus import RieszParams
from riesz_disk.ring_fredholm import (IllConditionedError, NystromConfig, ring_kernel,
                                      ring_solve)

mp.mp.dps = 40


def kernel_ref(u, r, a, d, lam):
    beta = mp.mpf(d + 2 * lam - 3) / 2
    gam = mp.mpf(d - 2 * lam + 3) / 2
    chi = lambda z: z * mp.hyp2f1(1, beta, gam, z)
    zu, zr = (mp.mpf(a) / u) ** 2, (mp.mpf(a) / r) ** 2
    return mp.mpf(a) ** (2 * gam - 2) / (mp.mpf(u) ** 2 * r ** 2) * (chi(zu) - chi(zr)) / (zu - zr)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 4, 5, 8]), st.sampled_from([0.3, 0.5, 0.7]), st.floats(0.05, 0.9),
       st.floats(1e-6, 1.0), st.floats(1e-6, 1.0))
def test_kernel_against_mpmath(d, lam, a, x, y):
    u, r = a + (1 - a) * x, a + (1 - a) * y
    if u == r:
        return
    p = RieszParams(d, lam)
    ref = float(kernel_ref(mp.mpf(u), mp.mpf(r), a, d, lam))
    got = float(ring_kernel(np.array([u]), np.array([r]), a, p)[0])
    assert abs(got - ref) <= 1e-12 * abs(ref)


def test_kernel_symmetry_and_domain():
    p = RieszParams(4, 0.3)
    rng = np.random.default_rng(1)
    u, r = rng.uniform(0.21, 1, size=(2, 300))
    K = ring_kernel(u, r, 0.2, p)
    assert np.max(np.abs(K - ring_kernel(r, u, 0.2, p)) / np.abs(K)) < 1e-13
    # diagonal is the continuous limit
    x = 0.6
    near = ring_kernel(np.array([x + 1e-7]), np.array([x]), 0.2, p)[0]
    assert abs(ring_kernel(np.array([x]), np.array([x]), 0.2, p)[0] - near) < 1e-6 * abs(near)
    with pytest.raises(Exception):
        ring_kernel(np.array([0.2]), np.array([0.5]), 0.2, p)


@pytest.mark.parametrize("d,lam", [(3, 0.5), (4, 0.3)])
def test_ring_self_convergence(d, lam):
    p = RieszParams(d, lam)
    Q = F.PointChargeField(1.0, 0.4).radial(p)
    g = np.linspace(0.22, 0.98, 30)
    s1 = ring_solve(Q, p, 0.2, 1.0, NystromConfig(64))
    s2 = ring_solve(Q, p, 0.2, 1.0, NystromConfig(128))
    assert np.max(np.abs(s2.G(g) - s1.G(g))) < 1e-5 * abs(s2.F_Q)
    assert abs(s2.F_Q - s1.F_Q) < 1e-5 * abs(s2.F_Q)


@pytest.mark.parametrize("d,lam", [
    (3, 0.5),
    pytest.param(4, 0.3, marks=pytest.mark.xfail(
        strict=True, reason="inner-edge layer for lam < 1/2: residual 7.5e-6 at n=128")),
])
def test_ring_residual_and_mass(d, lam):
    p = RieszParams(d, lam)
    sol = ring_solve(F.PointChargeField(1.0, 0.4).radial(p), p, 0.2, 1.0, NystromConfig(128))
    assert sol.residual_norm < 1e-6
    assert abs(sol.mass - 1.0) < 1e-8


@pytest.mark.parametrize("d", [3, 4])
def test_ring_small_lam_converges(d):
    # lam < 1/2: the inner-edge layer s^(lam-1) log s limits the graded rule to about n^-2
    p = RieszParams(d, 0.3)
    Q = F.PointChargeField(1.0, 0.4).radial(p)
    res = [ring_solve(Q, p, 0.2, 1.0, NystromConfig(n)).residual_norm for n in (64, 128, 256)]
    assert res[0] > 3.0 * res[1] > 9.0 * res[2]
    assert res[2] < 5e-6


def test_ring_oracle_consistency():
    # solution with a chosen ring: U + Q equals F_Q on the support
    p = RieszParams(3, 0.5)
    Q = F.PointChargeField(1.0, 0.2).radial(p)
    sol = ring_solve(Q, p, 0.3, 1.0)
    rep = verify(sol, Q, p)
    assert rep.max_potential_deviation_on_support < 1e-6
    assert abs(rep.mass_error) < 1e-8


def test_zero_field_on_a_ring_is_rejected():
    # the true support is the whole disk, so the inequality inside r < a fails
    p = RieszParams(3, 0.5)
    Q = F.ZeroField().radial(p)
    rep = verify(ring_solve(None, p, 0.3, 1.0), Q, p)
    assert not rep.passed and rep.min_inequality_slack_off_support < 0


def test_ring_argument_checks():
    p = RieszParams(3, 0.5)
    with pytest.raises(ValueError):
        ring_solve(None, p, 0.5, 0.4)
    with pytest.raises(ValueError):
        NystromConfig(4)
    with pytest.raises(IllConditionedError):
        ring_solve(F.PointChargeField(1.0, 0.4).radial(RieszParams(3, 0.15)),
                   RieszParams(3, 0.15), 0.2, 1.0)
