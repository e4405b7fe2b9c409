import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riesz_disk import fields as F
from riesz_disk.disk_solver import solve_on_disk
from riesz_disk.potential_oracle import (CoincidentPointsError, Tolerances, energy,
                                         potential_of_density, reduced_kernel_copson,
                                         reduced_kernel_direct, reduced_kernel_hypergeometric,
                                         verify)
from riesz_disk.radial_calculus import RieszParams
from riesz_disk.support_solver import critical_radius


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 8), st.floats(0.1, 0.9), st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_three_kernels_agree(d, lam, r, rho):
    if abs(r - rho) < 1e-3:
        return
    p = RieszParams(d, lam)
    h = reduced_kernel_hypergeometric(r, rho, p)
    assert abs(reduced_kernel_direct(r, rho, p) - h) < 1e-10 * abs(h)
    assert abs(reduced_kernel_copson(r, rho, p) - h) < 1e-10 * abs(h)


def test_kernel_edge_cases():
    p = RieszParams(3, 0.5)
    with pytest.raises(CoincidentPointsError):
        reduced_kernel_hypergeometric(0.5, 0.5, p)
    with pytest.raises(ValueError):
        reduced_kernel_hypergeometric(-0.1, 0.5, p)
    assert reduced_kernel_hypergeometric(0.5, 0.0, p) == 0.0
    # r = 0: every point of the sphere at distance rho
    assert math.isclose(reduced_kernel_hypergeometric(0.0, 0.4, p),
                        reduced_kernel_direct(0.0, 0.4, p), rel_tol=1e-12)


@pytest.mark.parametrize("d,lam", [(3, 0.5), (5, 0.3), (4, 0.75)])
def test_zero_field_potential_is_constant_and_energy_is_F(d, lam):
    p = RieszParams(d, lam)
    res = solve_on_disk(F.ZeroField().radial(p), p)
    U = [potential_of_density(res.density, p, x) for x in (0.0, 0.3, 0.7, 0.95)]
    assert np.max(np.abs(np.array(U) - res.F_Q)) < 1e-8 * res.F_Q
    assert abs(energy(res.density, p) - res.F_Q) < 1e-10 * res.F_Q
    # close to the singular edge, on both sides
    for x in (1 - 1e-5, 1 - 1e-8):
        assert abs(potential_of_density(res.density, p, x) / res.F_Q - 1) < 1e-9
    assert potential_of_density(res.density, p, 1.0 + 1e-9) <= res.F_Q * (1 + 1e-8)


def test_verify_reports():
    p = RieszParams(3, 0.5)
    m = F.MonomialField(3 * math.pi, 2.0)
    Q = m.radial(p)
    R = critical_radius(Q, p)
    rep = verify(solve_on_disk(Q, p, R), Q, p)
    assert rep.passed and rep.min_inequality_slack_off_support > 0
    data = json.loads(rep.to_json())
    assert set(data) == {"max_potential_deviation_on_support",
                         "min_inequality_slack_off_support", "mass_error", "min_density",
                         "passed"}
    # a support strictly inside R* violates the off-support inequality
    bad = verify(solve_on_disk(Q, p, 0.8 * R), Q, p)
    assert not bad.passed and bad.min_inequality_slack_off_support < 0
    # impossible tolerance fails the on-support test
    assert not verify(solve_on_disk(Q, p, R), Q, p, Tolerances(on_support=1e-18)).passed
