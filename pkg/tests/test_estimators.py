import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from riesz_disk import DiskEquilibrium, RingEquilibrium, equilibrium_density
from riesz_disk.fields import MonomialField, monomial_support_radius
from riesz_disk.radial_calculus import RieszParams
from riesz_disk.support_solver import HypothesisError


def test_params_and_clone():
    est = DiskEquilibrium(d=4, lam=0.3)
    assert est.get_params() == {"d": 4, "lam": 0.3, "R": None, "grid_n": 64}
    c = clone(est.set_params(lam=0.4))
    assert c.lam == 0.4 and not hasattr(c, "result_")
    assert RingEquilibrium().get_params()["n_nodes"] == 256


def test_disk_fit_predict():
    est = DiskEquilibrium().fit("zero")
    r = np.array([0.0, 0.5, 0.99, 1.0, 1.5])
    f = est.predict(r)
    p = RieszParams(3, 0.5)
    assert np.allclose(f[:3], equilibrium_density(p, 1.0, r[:3]), rtol=1e-12)
    assert np.all(f[3:] == 0.0)
    assert math.isclose(est.F_Q_, math.pi / 2, rel_tol=1e-12)
    assert est.verify().passed


def test_disk_picks_critical_radius():
    m = MonomialField(20.0, 2.0)
    est = DiskEquilibrium(d=3, lam=0.5).fit(m)
    assert math.isclose(est.R_, monomial_support_radius(m, RieszParams(3, 0.5)), rel_tol=1e-9)
    with pytest.raises(HypothesisError):
        DiskEquilibrium().fit(_decreasing())


def _decreasing():
    from riesz_disk.radial_calculus import RadialFunction
    return RadialFunction(lambda r: (1 - r) ** 2, lambda r: -2 * (1 - r), lambda r: 2 + 0 * r)


def test_ring_fit_predict():
    est = RingEquilibrium(a=0.3, n_nodes=64).fit("point:q=1,h=0.2")
    assert est.support_ == (0.3, 1.0)
    assert est.predict(np.array([0.1]))[0] == 0.0
    assert est.predict(np.array([0.6]))[0] > 0
    assert est.residual_norm_ < 1e-5
    U = est.weighted_potential(np.array([0.5, 0.7]))
    assert np.max(np.abs(U - est.F_Q_)) < 1e-5 * est.F_Q_


def test_not_fitted():
    with pytest.raises(NotFittedError):
        DiskEquilibrium().predict([0.1])
