import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from riesz_disk import fields as F
from riesz_disk.radial_calculus import RadialFunction, RieszParams
from riesz_disk.support_solver import (HypothesisError, SupportDecision, classify_support,
                                       critical_height, critical_radius, delta_of_R,
                                       ms_functional)

P3 = RieszParams(3, 0.5)


def test_classify_support():
    assert classify_support(F.ZeroField().radial()).kind == "full_disk"
    assert classify_support(F.MonomialField(1.0, 2.0).radial()).rationale == \
        "field_convex_increasing"
    dec = classify_support(F.PointChargeField(1.0, 0.5).radial(P3))
    assert dec.kind == "unknown"  # bell-shaped, not convex
    dec = classify_support(RadialFunction(lambda r: (1.0 - r) ** 2))
    assert (dec.kind, dec.rationale) == ("ring", "field_convex_decreasing")
    dec = classify_support(RadialFunction(lambda r: (r - 0.4) ** 2))
    assert (dec.kind, dec.rationale) == ("ring", "field_convex")
    with pytest.raises(ValueError):
        SupportDecision("disk", "x", R=1.5)
    with pytest.raises(ValueError):
        SupportDecision("ring", "x", a=0.5, b=0.4)


@pytest.mark.parametrize("d,lam", [(3, 0.5), (5, 0.2), (4, 0.8)])
def test_critical_radius_minimises_ms_functional(d, lam):
    p = RieszParams(d, lam)
    Q = F.MonomialField(30.0, 2.0).radial(p)
    R = critical_radius(Q, p)
    assert 0 < R < 1
    assert abs(delta_of_R(Q, p, R)) < 1e-9
    opt = minimize_scalar(lambda x: ms_functional(Q, p, x), bounds=(0.05, 1.0),
                          method="bounded", options={"xatol": 1e-10})
    assert abs(opt.x - R) < 1e-5


def test_critical_radius_full_disk_and_hypotheses():
    assert critical_radius(F.MonomialField(0.01, 2.0).radial(P3), P3) == 1.0
    assert critical_radius(F.ZeroField().radial(), P3) == 1.0
    with pytest.raises(HypothesisError):
        critical_radius(RadialFunction(lambda r: (1.0 - r) ** 2), P3)
    with pytest.raises(ValueError):
        ms_functional(F.ZeroField().radial(), P3, 0.0)


@pytest.mark.parametrize("d,lam", [(3, 0.5), (4, 0.3), (8, 0.5)])
def test_critical_height_roots(d, lam):
    p = RieszParams(d, lam)
    ch = critical_height(F.PointChargeField(1.0, 1.0), p)
    assert abs(F.p_of_h(1.0, p, ch.h_plus)) < 1e-9
    assert ch.threshold == max(ch.h_minus, ch.h_plus)
    assert math.isclose(ch.h_minus, F.h_minus(1.0, p))
    assert list(ch.h_plus_candidates) == sorted(ch.h_plus_candidates)
    # above the threshold the full-disk candidate is admissible
    h = 1.05 * ch.threshold
    res_p = F.point_charge_density(F.PointChargeField(1.0, h), p, np.linspace(0, 0.99, 50))
    assert np.min(res_p) > 0
