import numpy as np
import pytest

from dynkde.dynamics import Trajectory, beta_map, gauss_map, generate_trajectory
from dynkde.estimators import (
    ame,
    ame_vector,
    bias_bound_check,
    density_estimate,
    full_estimate,
    make_grid,
    map_estimate,
    regression_estimate,
)
from dynkde.kernels import kernel_by_name, make_box, make_epanechnikov
from dynkde.stochastics import NoiseLaw, RngState


def synthetic(states, targets=None):
    states = np.asarray(states, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    if targets is None:
        targets = states[1:]
    else:
        targets = np.asarray(targets, dtype=float)
        if targets.ndim == 1:
            targets = targets[:, None]
    return Trajectory(states=states, targets=targets,
                      noise_law=NoiseLaw.none(states.shape[1]),
                      system_id="synthetic")


def test_density_single_point():
    val = density_estimate(np.array([0.0]), make_box(1), 1.0, np.array([0.0]))
    assert val[0] == 1.0


def test_density_two_points_one_outside():
    val = density_estimate(np.array([0.0, 10.0]), make_box(1), 1.0,
                           np.array([0.0]))
    assert val[0] == 0.5


def test_density_rejects_bad_input():
    with pytest.raises(ValueError):
        density_estimate(np.array([0.0]), make_box(1), 0.0, np.array([0.0]))
    with pytest.raises(ValueError):
        density_estimate(np.empty(0), make_box(1), 1.0, np.array([0.0]))
    with pytest.raises(ValueError):
        density_estimate(np.zeros((5, 2)), make_box(1), 1.0, np.zeros((1, 2)))


def test_make_grid_cell_centered():
    g = make_grid(0.0, 1.0, 4)
    assert g[:, 0] == pytest.approx([0.125, 0.375, 0.625, 0.875])
    g2 = make_grid([0.0, 0.0], [1.0, 1.0], 3)
    assert g2.shape == (9, 2)
    assert g2[0] == pytest.approx([1 / 6, 1 / 6])


def test_constant_targets_give_constant_regression():
    rng = np.random.default_rng(0)
    states = rng.uniform(0, 1, size=200)
    traj = synthetic(states, targets=np.full(199, 0.7))
    points = make_grid(0.0, 1.0, 50)
    r = regression_estimate(traj, make_epanechnikov(), 0.1, points)
    f = density_estimate(traj.states[:-1], make_epanechnikov(), 0.1, points)
    assert np.all(r[f > 0] == pytest.approx(0.7, abs=1e-12))


def test_zero_density_gives_zero_regression():
    traj = synthetic([0.1, 0.2, 0.15, 0.18])
    far = np.array([10.0])
    assert density_estimate(traj, make_box(1), 0.05, far)[0] == 0.0
    assert regression_estimate(traj, make_box(1), 0.05, far)[0] == 0.0


def test_regression_bounded_by_target_range():
    sys_ = beta_map(27 / 11)
    traj = generate_trajectory(sys_, 5000, NoiseLaw.uniform(0.3), RngState(2))
    points = make_grid(0.0, 1.0, 100)
    r = regression_estimate(traj, make_epanechnikov(), 0.05, points)
    f = density_estimate(traj.states[:-1], make_epanechnikov(), 0.05, points)
    y = traj.targets[:, 0]
    occupied = f > 0
    assert np.all(r[occupied] >= y.min() - 1e-12)
    assert np.all(r[occupied] <= y.max() + 1e-12)


def test_pointwise_map_estimate_noiseless():
    sys_ = beta_map(27 / 11)
    traj = generate_trajectory(sys_, 50_000, NoiseLaw.none(1), RngState(5))
    r = regression_estimate(traj, make_epanechnikov(), 0.007,
                            np.array([0.5]))
    assert abs(r[0] - 5 / 22) <= 0.02


def test_map_estimate_matches_regression_1d():
    sys_ = beta_map(27 / 11)
    traj = generate_trajectory(sys_, 2000, NoiseLaw.none(1), RngState(6))
    points = make_grid(0.0, 1.0, 64)
    t = map_estimate(traj, make_epanechnikov(), 0.02, points)
    r = regression_estimate(traj, make_epanechnikov(), 0.02, points)
    assert np.array_equal(t[:, 0], r)


def test_fast_and_slow_paths_agree():
    sys_ = beta_map(27 / 11)
    traj = generate_trajectory(sys_, 5000, NoiseLaw.uniform(0.3), RngState(7))
    points = make_grid(0.0, 1.0, 100)
    for name in ("box1d", "epanechnikov"):
        k = kernel_by_name(name)
        fast_f = density_estimate(traj, k, 0.03, points)
        slow_f = density_estimate(traj, k, 0.03, points, force_slow=True)
        assert np.max(np.abs(fast_f - slow_f)) <= 1e-12
        fast_t = map_estimate(traj, k, 0.03, points)
        slow_t = map_estimate(traj, k, 0.03, points, force_slow=True)
        assert np.max(np.abs(fast_t - slow_t)) <= 1e-12


def test_fast_and_slow_paths_agree_2d():
    import dynkde.dynamics as dyn

    sys_ = dyn.system_by_spec("matrixbeta:2.5,3.4,4.6,3.2")
    traj = generate_trajectory(sys_, 20_000, NoiseLaw.none(2), RngState(8))
    points = make_grid([0.0, 0.0], [1.0, 1.0], 20)
    k = make_box(2)
    fast = density_estimate(traj, k, 0.05, points)
    slow = density_estimate(traj, k, 0.05, points, force_slow=True)
    assert np.max(np.abs(fast - slow)) <= 1e-12
    fast_t = map_estimate(traj, k, 0.05, points)
    slow_t = map_estimate(traj, k, 0.05, points, force_slow=True)
    assert np.max(np.abs(fast_t - slow_t)) <= 1e-12


def test_mass_coherence():
    sys_ = beta_map(27 / 11)
    traj = generate_trajectory(sys_, 50_000, NoiseLaw.none(1), RngState(9))
    points = make_grid(0.0, 1.0, 500)
    f = density_estimate(traj, make_epanechnikov(), 0.01, points)
    mass = np.trapezoid(f, points[:, 0])
    assert 0.95 <= mass <= 1.02


def test_shift_equivariance():
    rng = np.random.default_rng(3)
    states = rng.uniform(0, 1, size=1000)
    points = make_grid(0.0, 1.0, 50)
    f0 = density_estimate(states, make_epanechnikov(), 0.05, points)
    shift = 3.25
    f1 = density_estimate(states + shift, make_epanechnikov(), 0.05,
                          points + shift)
    assert np.max(np.abs(f0 - f1)) <= 1e-9


def test_ame_examples():
    assert ame([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert ame([0.1, 0.3], [0.0, 0.0]) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        ame([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        ame([], [])


def test_ame_vector():
    est = np.array([[0.0, 1.0], [1.0, 0.0]])
    tru = np.zeros((2, 2))
    coord, sup = ame_vector(est, tru)
    assert coord == pytest.approx([0.5, 0.5])
    assert sup == pytest.approx(1.0)


def test_full_estimate_zero_denominator_convention():
    sys_ = beta_map(27 / 11)
    traj = generate_trajectory(sys_, 200, NoiseLaw.none(1), RngState(10))
    est = full_estimate(traj, sys_, make_box(1), 0.001, make_grid(0, 1, 500))
    assert np.all(est.f_hat >= 0.0)
    empty = est.f_hat == 0.0
    assert empty.any()  # h tiny: some cells must be unoccupied
    # recompute occupancy over the regression index set (first n-1 states)
    f_reg = density_estimate(traj.states[:-1], make_box(1), 0.001, est.points)
    assert np.all(est.t_hat[f_reg == 0.0] == 0.0)


def test_bias_check_uniform_density_all_pass():
    sys_ = beta_map(2.0)
    report = bias_bound_check(sys_, make_epanechnikov(), 0.01, 0.05, 1.0,
                              make_grid(0.1, 0.9, 50))
    assert report.passed.all()


def test_bias_check_gauss_interior_all_pass():
    report = bias_bound_check(gauss_map(), make_epanechnikov(), 0.01, 0.02,
                              1.0, make_grid(0.05, 0.95, 50))
    assert report.passed.all()


def test_bias_check_failures_confined_to_bad_set():
    sys_ = beta_map(27 / 11)
    report = bias_bound_check(sys_, make_epanechnikov(), 0.01, 0.02, 1.0,
                              make_grid(0.0, 1.0, 400))
    assert report.failing_points.size > 0  # jumps of the Parry density
    assert report.failures_inside_bad_set


def test_bias_check_validates_inputs():
    sys_ = beta_map(2.0)
    with pytest.raises(ValueError):
        bias_bound_check(sys_, make_epanechnikov(), 0.01, 0.001, 1.0,
                         make_grid(0, 1, 10))  # u below h*diam
    import dynkde.dynamics as dyn

    no_oracle = dyn.logistic_map(3.8)
    with pytest.raises(ValueError):
        bias_bound_check(no_oracle, make_epanechnikov(), 0.01, 0.05, 1.0,
                         make_grid(0, 1, 10))
