import math

import numpy as np
import pytest
from hypothesis import given

from conftest import small_vectors, vectors
from depvi.so3 import (
    E_X,
    E_Y,
    E_Z,
    I3,
    bracket,
    cross,
    diamond,
    hat,
    is_skew,
    modified_inertia,
    orthogonality_error,
    pairing,
    polar_project,
    rodrigues_exp,
    vee,
)


def series_exp(W, terms=20):
    """Truncated power series sum_k W^k / k!."""
    out, term = np.eye(3), np.eye(3)
    for k in range(1, terms):
        term = term @ W / k
        out = out + term
    return out


@pytest.mark.parametrize(
    "w, expected",
    [
        ((0, 0, 0), np.zeros((3, 3))),
        ((1, 2, 3), [[0, -3, 2], [3, 0, -1], [-2, 1, 0]]),
        ((0, 0, 1), [[0, -1, 0], [1, 0, 0], [0, 0, 0]]),
    ],
)
def test_hat_values(w, expected):
    np.testing.assert_array_equal(hat(w), np.array(expected, dtype=float))


@pytest.mark.parametrize("w", [(0.0, 0.0, 0.0), (1.0, 2.0, 3.0), (-0.5, 4.0, 9.0)])
def test_vee_roundtrip(w):
    np.testing.assert_array_equal(vee(hat(w)), w)


def test_vee_rejects_non_skew():
    W = hat((1.0, 2.0, 3.0))
    W[0, 1] += 1e-9
    with pytest.raises(ValueError, match="skew"):
        vee(W)
    with pytest.raises(ValueError):
        vee(np.eye(2))
    assert not is_skew(W)
    assert is_skew(hat((1.0, 2.0, 3.0)))


def test_pairing_values():
    assert pairing(hat(E_X), hat(E_X)) == pytest.approx(1.0, abs=1e-15)
    assert pairing(hat((1, 2, 3)), hat((4, 5, 6))) == pytest.approx(32.0, abs=1e-14)
    assert pairing(hat((1, 2, 3)), np.zeros((3, 3))) == 0.0


def test_diamond_values():
    np.testing.assert_array_equal(diamond(E_X, E_Y), hat(E_Z))
    np.testing.assert_array_equal(diamond((1, 2, 3), (1, 2, 3)), np.zeros((3, 3)))
    np.testing.assert_array_equal(diamond((1, 2, 3), (4, 5, 6)), hat((-3, 6, -3)))


def test_rodrigues_values():
    np.testing.assert_array_equal(rodrigues_exp((0, 0, 0)), I3)
    quarter = [[0, -1, 0], [1, 0, 0], [0, 0, 1]]
    np.testing.assert_allclose(rodrigues_exp((0, 0, math.pi / 2)), quarter, atol=1e-15)
    w = np.array([0.1, 0.2, 0.3])
    R = rodrigues_exp(w)
    np.testing.assert_allclose(R, series_exp(hat(w)), atol=1e-13, rtol=0)
    assert orthogonality_error(R) < 1e-13


@pytest.mark.parametrize("theta", [0.0, 1e-9, 5e-5, 9.99e-5, 1e-4, 1.01e-4, 1e-3, 0.5, 2.0, 3.0])
def test_rodrigues_matches_series_across_branch(theta):
    w = theta * np.array([2.0, -1.0, 2.0]) / 3.0
    np.testing.assert_allclose(rodrigues_exp(w), series_exp(hat(w), terms=40), atol=1e-15 * max(1.0, theta**2) + 2e-16)


@pytest.mark.parametrize(
    "J, expected",
    [
        (np.eye(3), 0.5 * np.eye(3)),
        (np.diag([5.46, 5.29, 5.72]), np.diag([2.775, 2.945, 2.515])),
        (np.diag([2.0, 2.0, 2.0]), np.eye(3)),
    ],
)
def test_modified_inertia_values(J, expected):
    np.testing.assert_allclose(modified_inertia(J), expected, atol=1e-14)


def test_modified_inertia_rejects_asymmetric():
    J = np.diag([1.0, 2.0, 3.0])
    J[0, 1] = 1e-6
    with pytest.raises(ValueError, match="symmetric"):
        modified_inertia(J)


def test_polar_project_recovers_rotation(rng):
    R = rodrigues_exp(rng.normal(size=3))
    noisy = R + 1e-6 * rng.normal(size=(3, 3))
    Q = polar_project(noisy)
    assert orthogonality_error(Q) < 1e-14
    assert np.linalg.det(Q) == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(Q, R, atol=1e-5)


# --- properties ---------------------------------------------------------------


@given(vectors)
def test_hat_vee_exact(w):
    np.testing.assert_array_equal(vee(hat(w)), w)
    np.testing.assert_array_equal(hat(vee(hat(w))), hat(w))


@given(small_vectors, small_vectors)
def test_hat_is_cross(u, v):
    np.testing.assert_allclose(hat(u) @ v, np.cross(u, v), atol=1e-14, rtol=0)
    np.testing.assert_allclose(cross(u, v), np.cross(u, v), atol=1e-15, rtol=0)


@given(small_vectors, small_vectors)
def test_pairing_is_dot(u, v):
    assert abs(pairing(hat(u), hat(v)) - float(u @ v)) <= 1e-14


@given(small_vectors, small_vectors)
def test_bracket_is_hat_of_cross(u, v):
    np.testing.assert_allclose(bracket(hat(u), hat(v)), diamond(u, v), atol=1e-14, rtol=0)


@given(vectors)
def test_rodrigues_orthogonal(w):
    R = rodrigues_exp(w)
    assert np.max(np.abs(R.T @ R - I3)) <= 1e-13
    assert abs(np.linalg.det(R) - 1.0) <= 1e-13


@given(small_vectors)
def test_skew_cube(w):
    W = hat(w)
    np.testing.assert_allclose(W @ W @ W, -float(w @ w) * W, atol=1e-12, rtol=0)
