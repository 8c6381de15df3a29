import numpy as np
import pytest

from dynkde.kernels import (
    Kernel,
    SeminormFamily,
    SeminormTag,
    eval_scaled,
    kernel_by_name,
    make_box,
    make_epanechnikov,
    scaled_seminorm_bound,
)

ALL_NAMES = ["epanechnikov", "box1d", "box2d"]


def test_epanechnikov_values():
    k = make_epanechnikov()
    assert k.profile(np.array(0.0)) == 0.75
    assert k.profile(np.array(1.0)) == 0.0
    assert k.profile(np.array(-1.0)) == 0.0
    assert abs(k.integral_check - 1.0) <= 1e-9


def test_epanechnikov_metadata():
    k = make_epanechnikov()
    assert k.support_diameter == 2.0
    assert k.seminorm_constant == 1.5
    assert k.scaling_exponent == 1.0
    assert k.family.tag is SeminormTag.LIPSCHITZ


def test_box1d_values():
    k = make_box(1)
    assert k.profile(np.array(0.0)) == 1.0
    assert k.profile(np.array(0.75)) == 0.0
    assert k.seminorm_constant == 2.0
    assert k.scaling_exponent == 0.0


def test_box2d_values():
    k = make_box(2)
    assert k.profile(np.array([0.0, 0.0])) == 0.25
    assert k.profile(np.array([1.5, 0.0])) == 0.0
    assert k.support_diameter == 2.0


def test_box_rejects_other_dimensions():
    for d in (0, 3, 5):
        with pytest.raises(ValueError):
            make_box(d)


def test_kernel_by_name_roundtrip():
    for name in ALL_NAMES:
        assert kernel_by_name(name).name == name
    with pytest.raises(ValueError):
        kernel_by_name("gaussian")


def test_unit_mass_all_builtins():
    for name in ALL_NAMES:
        k = kernel_by_name(name)
        assert abs(k.integral_check - 1.0) <= 1e-6


def test_eval_scaled_examples():
    epan = make_epanechnikov()
    for h in (0.1, 1.0, 7.0):
        assert eval_scaled(epan, 0.3, 0.3, h) == 0.75
    box = make_box(1)
    assert eval_scaled(box, 0.3, 0.0, 0.5) == 0.0
    assert eval_scaled(box, 0.2, 0.0, 0.5) == 1.0


def test_eval_scaled_rejects_bad_h():
    with pytest.raises(ValueError):
        eval_scaled(make_box(1), 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        eval_scaled(make_box(1), 0.0, 0.0, -1.0)


def test_eval_scaled_nonnegative_and_compact():
    rng = np.random.default_rng(0)
    for name in ("epanechnikov", "box1d"):
        k = kernel_by_name(name)
        h = 0.2
        x = rng.uniform(-2, 2, size=1000)
        vals = eval_scaled(k, x, 0.0, h)
        assert np.all(vals >= 0.0)
        outside = np.abs(x) > h * k.support_diameter / 2.0
        assert np.all(vals[outside] == 0.0)


def test_scaled_seminorm_bound_examples():
    assert scaled_seminorm_bound(make_box(1), 0.01) == 2.0
    assert scaled_seminorm_bound(make_epanechnikov(), 0.5) == 3.0
    for name in ALL_NAMES:
        k = kernel_by_name(name)
        assert scaled_seminorm_bound(k, 1.0) == k.seminorm_constant
    with pytest.raises(ValueError):
        scaled_seminorm_bound(make_box(1), 0.0)


def test_box_total_variation_scale_invariant():
    # total variation of t -> K((x - t)/h) on a fine grid equals C(K) = 2
    # for every h (scaling exponent 0)
    k = make_box(1)
    for h in (0.05, 0.2, 1.0):
        t = np.linspace(-2, 2, 400_001)
        vals = eval_scaled(k, 0.1, t, h)
        tv = np.sum(np.abs(np.diff(vals)))
        assert tv == pytest.approx(k.seminorm_constant)


def test_epanechnikov_scaled_lipschitz_constant():
    k = make_epanechnikov()
    for h in (0.1, 0.5):
        t = np.linspace(-2, 2, 200_001)
        vals = eval_scaled(k, 0.0, t, h)
        slopes = np.abs(np.diff(vals)) / np.diff(t)
        assert slopes.max() <= (k.seminorm_constant / h) * (1 + 1e-3)


def test_beta_ge_one_warns_not_rejects():
    with pytest.warns(UserWarning, match="scaling exponent"):
        k = Kernel(
            name="custom",
            dimension=1,
            profile=lambda x: np.where(np.abs(x) <= 1.0, 0.75 * (1 - x**2), 0.0),
            support_diameter=2.0,
            seminorm_constant=1.5,
            family=SeminormFamily(SeminormTag.LIPSCHITZ),
            scaling_exponent=1.0,
        )
    assert k.scaling_exponent == 1.0


def test_bad_mass_rejected():
    with pytest.raises(ValueError, match="mass"):
        Kernel(
            name="half",
            dimension=1,
            profile=lambda x: 0.5 * (np.abs(np.asarray(x)) <= 0.5),
            support_diameter=1.0,
            seminorm_constant=1.0,
            family=SeminormFamily(SeminormTag.BOUNDED_VARIATION),
            scaling_exponent=0.0,
        )


def test_holder_family_validation():
    with pytest.raises(ValueError):
        SeminormFamily(SeminormTag.HOLDER, holder_exponent=1.5)
    with pytest.raises(ValueError):
        SeminormFamily(SeminormTag.HOLDER)
    with pytest.raises(ValueError):
        SeminormFamily(SeminormTag.LIPSCHITZ, holder_exponent=0.5)
    fam = SeminormFamily(SeminormTag.HOLDER, holder_exponent=0.5)
    assert fam.natural_scaling_exponent() == 0.5
