import math

import numpy as np
import pytest

from dynkde.bounds import (
    E_POW_INV_E,
    BoundParams,
    MixingModel,
    bandwidth_schedule,
    concentration_bound,
    density_deviation_envelope,
    moment_bound,
    regression_deviation_envelope,
    smallest_linear_majorant,
    weighted_phi_sum,
)


def test_mixing_model_validation():
    with pytest.raises(ValueError):
        MixingModel.geometric(1.0, 1.0)
    with pytest.raises(ValueError):
        MixingModel.geometric(1.0, 0.0)
    with pytest.raises(ValueError):
        MixingModel.geometric(0.0, 0.5)
    with pytest.raises(ValueError):
        MixingModel.explicit([1.0, 0.5])  # tail not negligible
    with pytest.raises(ValueError):
        MixingModel.parse("polynomial:2")
    m = MixingModel.parse("geometric:1,0.5")
    assert m.phi0 == 1.0 and m.gamma == 0.5


def test_weighted_phi_sum_examples():
    m = MixingModel.geometric(1.0, 0.5)
    assert weighted_phi_sum(m, 1) == pytest.approx(m.phi0)
    assert weighted_phi_sum(m, 3) == pytest.approx(4.25)
    e = MixingModel.explicit([2.5, 0.0])
    assert weighted_phi_sum(e, 1) == pytest.approx(2.5)


def test_closed_form_matches_direct_sum():
    for gamma in (0.1, 0.5, 0.9, 0.99):
        m = MixingModel.geometric(1.0, gamma)
        for n in (10, 1000, 1_000_000):
            closed = weighted_phi_sum(m, n, method="closed")
            direct = weighted_phi_sum(m, n, method="direct")
            assert abs(closed - direct) <= 1e-10 * max(1.0, abs(direct))


def test_smallest_linear_majorant():
    m = MixingModel.geometric(1.0, 0.5)
    r_small = smallest_linear_majorant(m, 10)
    r_big = smallest_linear_majorant(m, 10_000)
    assert r_small <= r_big <= 2.0
    assert r_big == pytest.approx(2.0, abs=1e-3)
    assert smallest_linear_majorant(m, 1) == pytest.approx(m.phi0)
    e = MixingModel.explicit([1.0, 0.0])
    assert smallest_linear_majorant(e, 100) == pytest.approx(1.0)


def test_moment_bound():
    m = MixingModel.geometric(1.0, 0.5)
    val = moment_bound(m, c_phi=2.0, n=3, p=2.0)
    assert val == pytest.approx(2.0 * math.sqrt(2 * 2 * 4.25))
    with pytest.raises(ValueError):
        moment_bound(m, 1.0, 3, 1.0)


def test_concentration_bound_t_zero_vacuous():
    m = MixingModel.geometric(1.0, 0.5)
    b = concentration_bound(m, 1.0, 100, 0.0)
    assert b.raw == pytest.approx(E_POW_INV_E)
    assert b.clipped == 1.0


def test_concentration_doubling_identity():
    m = MixingModel.geometric(1.0, 0.5)
    b1 = concentration_bound(m, 1.0, 100, 10.0)
    b2 = concentration_bound(m, 1.0, 100, 20.0)
    assert b2.raw == pytest.approx(
        E_POW_INV_E * (b1.raw / E_POW_INV_E) ** 4, rel=1e-10
    )


def test_concentration_exponent_value():
    m = MixingModel.geometric(1.0, 0.5)
    b = concentration_bound(m, 1.0, 100, 50.0)
    s = weighted_phi_sum(m, 100)
    expected = E_POW_INV_E * math.exp(-2500.0 / (2 * math.e * s))
    assert b.raw == pytest.approx(expected, rel=1e-12)


def test_concentration_zero_seminorm_convention():
    m = MixingModel.geometric(1.0, 0.5)
    assert concentration_bound(m, 0.0, 10, 1.0).raw == 0.0
    assert concentration_bound(m, 0.0, 10, 0.0).clipped == 1.0


def test_concentration_monotone_in_t_and_n():
    m = MixingModel.geometric(1.0, 0.9)
    ts = np.linspace(0, 50, 30)
    vals = [concentration_bound(m, 1.0, 100, t).raw for t in ts]
    assert np.all(np.diff(vals) <= 1e-15)
    # at fixed t the denominator grows with n, so the bound increases in n;
    # the *normalized* deviation bounds below decrease in n instead
    assert all(0 < v <= E_POW_INV_E for v in vals)


def params(t, n=50_000, h=0.007, beta=0.0, c_k=2.0, u=None, **kw):
    return BoundParams(n=n, h=h, beta=beta, c_k=c_k, t=t,
                       u=h if u is None else u, **kw)


def test_density_envelope_monotone_and_limits():
    m = MixingModel.geometric(1.0, 0.9)
    ts = np.linspace(0.01, 20.0, 40)
    vals = [density_deviation_envelope(params(t), m).raw for t in ts]
    assert np.all(np.diff(vals) <= 1e-18)
    big = density_deviation_envelope(params(1e4), m)
    assert big.raw <= 1e-10
    # exponent linear in n: doubling n halves the log-bound (up to the
    # slight n-dependence of the linear majorant R, which converges to
    # C/(1-gamma) from below)
    e1 = density_deviation_envelope(params(1.0, n=10_000), m)
    e2 = density_deviation_envelope(params(1.0, n=20_000), m)
    log1 = math.log(e1.raw / (2 * E_POW_INV_E))
    log2 = math.log(e2.raw / (2 * E_POW_INV_E))
    assert log2 == pytest.approx(2 * log1, rel=1e-3)


def test_density_envelope_paper_scale_instance():
    m = MixingModel.geometric(1.0, 0.9)
    env = density_deviation_envelope(params(0.5), m)
    assert env.raw > 0.0 and math.isfinite(env.raw)
    assert env.clipped <= 1.0
    assert env.bad_set_budget > 0.0


def test_density_envelope_vacuous_below_bias():
    m = MixingModel.geometric(1.0, 0.9)
    env = density_deviation_envelope(params(0.001, u=0.01), m)
    assert env.vacuous and env.clipped == 1.0
    assert env.raw > 0.0  # raw value still reported


def test_bound_params_validation():
    with pytest.raises(ValueError):
        BoundParams(n=10, h=0.01, beta=0.0, c_k=1.0, t=1.0, u=0.001,
                    support_diameter=1.0)  # u below h*diam
    with pytest.raises(ValueError):
        BoundParams(n=0, h=0.01, beta=0.0, c_k=1.0, t=1.0, u=0.01)


def test_regression_envelope_bounded_y():
    m = MixingModel.geometric(1.0, 0.9)
    base = dict(n=50_000, h=0.007, beta=0.0, c_k=2.0, u=0.007,
                support_diameter=1.0, inf_f=0.5)
    p = BoundParams(t=0.0, y_max=1.3, **base)
    env0 = regression_deviation_envelope(p, m, m, bounded_y=True)
    assert env0.vacuous and env0.clipped == 1.0
    p1 = BoundParams(t=1.0, y_max=1.3, **base)
    p2 = BoundParams(t=1.0, y_max=1e9, **base)
    e1 = regression_deviation_envelope(p1, m, m, bounded_y=True)
    e2 = regression_deviation_envelope(p2, m, m, bounded_y=True)
    assert e1.raw < e2.raw
    assert e2.raw == pytest.approx(2 * E_POW_INV_E, rel=1e-4)
    # larger inf_f strictly decreases the bound
    p3 = BoundParams(t=1.0, y_max=1.3, **{**base, "inf_f": 1.0})
    e3 = regression_deviation_envelope(p3, m, m, bounded_y=True)
    assert e3.raw < e1.raw


def test_regression_envelope_unbounded_y():
    m = MixingModel.geometric(1.0, 0.9)
    base = dict(n=50_000, h=0.007, beta=0.0, c_k=2.0, u=0.007,
                support_diameter=1.0, inf_f=0.5)
    p = BoundParams(t=1.0, r_max=1.0, **base)
    env = regression_deviation_envelope(p, m, m, bounded_y=False)
    assert env.raw > 0.0 and math.isfinite(env.raw)
    with pytest.raises(ValueError):
        regression_deviation_envelope(
            BoundParams(t=1.0, **base), m, m, bounded_y=False
        )
    with pytest.raises(ValueError):
        regression_deviation_envelope(
            BoundParams(t=1.0, **base), m, m, bounded_y=True
        )


def test_bandwidth_schedule():
    h, factor = bandwidth_schedule(1 / 3, 1_000_000, 0.0)
    assert h == pytest.approx(0.01)
    assert factor == pytest.approx(100.0)
    h2, f2 = bandwidth_schedule(0.25, 10_000, 1.0)
    assert h2 == pytest.approx(0.1)
    assert f2 == pytest.approx(10.0)
    with pytest.raises(ValueError):
        bandwidth_schedule(0.5, 100, 0.0)  # boundary xi = 1/(beta+2)
    with pytest.raises(ValueError):
        bandwidth_schedule(0.0, 100, 0.0)
