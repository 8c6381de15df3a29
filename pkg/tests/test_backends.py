import numpy as np
import pytest

from dynkde._core import BACKEND_NAME, backend, fallback

compiled_only = pytest.mark.skipif(
    BACKEND_NAME != "cython", reason="compiled backend not available"
)


@pytest.fixture(scope="module")
def data():
    rng = np.random.default_rng(0)
    xs = np.sort(rng.random(5000))
    pts = rng.random(300)
    Y = rng.random((5000, 1))
    X2 = rng.random((20_000, 2))
    X2 = X2[np.argsort(X2[:, 0], kind="stable")]
    Y2 = rng.random((20_000, 2))
    P2 = rng.random((200, 2))
    return xs, pts, Y, X2, Y2, P2


@compiled_only
def test_kernel_sums_1d_agree(data):
    xs, pts, Y, *_ = data
    for code, radius in ((0, 0.5), (1, 1.0)):
        a = backend.kernel_sums_1d(xs, pts, 0.01, radius, code)
        b = fallback.kernel_sums_1d(xs, pts, 0.01, radius, code)
        assert np.max(np.abs(a - b)) <= 1e-12
    a0, a1 = backend.kernel_weighted_sums_1d(xs, Y, pts, 0.01, 1.0, 1)
    b0, b1 = fallback.kernel_weighted_sums_1d(xs, Y, pts, 0.01, 1.0, 1)
    assert np.max(np.abs(a0 - b0)) <= 1e-12
    assert np.max(np.abs(a1 - b1)) <= 1e-12


@compiled_only
def test_kernel_sums_2d_agree(data):
    *_, X2, Y2, P2 = data
    a = backend.kernel_sums_2d(X2, P2, 0.02, 1.0, 0)
    b = fallback.kernel_sums_2d(X2, P2, 0.02, 1.0, 0)
    assert np.max(np.abs(a - b)) <= 1e-12
    a0, a1 = backend.kernel_weighted_sums_2d(X2, Y2, P2, 0.02, 1.0, 0)
    b0, b1 = fallback.kernel_weighted_sums_2d(X2, Y2, P2, 0.02, 1.0, 0)
    assert np.max(np.abs(a0 - b0)) <= 1e-12
    assert np.max(np.abs(a1 - b1)) <= 1e-12


@compiled_only
def test_orbits_bit_identical():
    cases = [
        ("orbit_beta", (0.371, 5000, 27 / 11, 0.0)),
        ("orbit_beta", (0.371, 5000, 2.0 * (1 + 2.0**-45), 0.0)),
        ("orbit_gauss", (0.371, 5000)),
        ("orbit_alpha_gauss", (0.1, 5000, 0.7)),
        ("orbit_logistic", (0.371, 5000, 3.8)),
    ]
    for name, args in cases:
        a = getattr(backend, name)(*args)
        b = getattr(fallback, name)(*args)
        assert np.array_equal(a, b), name
    a = backend.orbit_matrix2(0.3, 0.4, 5000, 2.5, 3.4, 4.6, 3.2)
    b = fallback.orbit_matrix2(0.3, 0.4, 5000, 2.5, 3.4, 4.6, 3.2)
    assert np.array_equal(a, b)


def test_env_override_selects_python(tmp_path):
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c",
         "import dynkde; print(dynkde.BACKEND_NAME)"],
        env={"DYNKDE_BACKEND": "python", "PATH": "/usr/bin:/bin"},
        capture_output=True, text=True,
    )
    assert out.stdout.strip() == "python"
