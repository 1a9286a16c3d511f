import numpy as np
import pytest

from depvi.checks import CHECK_NAMES, dtau_fd, run_battery
from depvi.group_maps import CAYLEY, EXP


def test_battery_passes_with_full_samples():
    results = run_battery(samples=1000, seed=0)
    assert [r.name for r in results] == CHECK_NAMES
    failed = [(r.name, r.max_error) for r in results if not r.passed]
    assert failed == []
    jac = [r for r in results if r.name.startswith("jacobian_fd")]
    assert all(r.samples == 100 for r in jac)


@pytest.mark.parametrize("seed", [1, 7, 99])
def test_battery_passes_for_other_seeds(seed):
    assert all(r.passed for r in run_battery(samples=100, seed=seed))


def test_battery_is_reproducible():
    a = run_battery(samples=50, seed=3, only={"jacobian_fd_exp", "skew_sandwich"})
    b = run_battery(samples=50, seed=3, only={"jacobian_fd_exp", "skew_sandwich"})
    assert [r.name for r in a] == ["skew_sandwich", "jacobian_fd_exp"]
    assert a == b


def test_battery_rejects_empty_sample_count():
    with pytest.raises(ValueError):
        run_battery(samples=0)


@pytest.mark.parametrize("tau_map", [CAYLEY, EXP], ids=lambda m: m.name)
def test_tangent_oracle_is_identity_at_origin(tau_map):
    np.testing.assert_allclose(dtau_fd(tau_map, np.zeros(3)), np.eye(3), atol=1e-9)


def test_cayley_tangent_oracle_closed_form():
    # dcay_xi = 4 / (4 + |xi|^2) (I + xi^x / 2), the inverse of I - xi^x / 2 + xi xi^T / 4
    xi = np.array([0.4, -0.3, 0.2])
    X = np.array([[0.0, -xi[2], xi[1]], [xi[2], 0.0, -xi[0]], [-xi[1], xi[0], 0.0]])
    expected = 4.0 / (4.0 + xi @ xi) * (np.eye(3) + 0.5 * X)
    np.testing.assert_allclose(dtau_fd(CAYLEY, xi), expected, atol=1e-9)
