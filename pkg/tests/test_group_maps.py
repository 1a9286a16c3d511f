import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import small_vectors
from depvi.checks import dtau_inv_dual_fd
from depvi.group_maps import (
    CAYLEY,
    EXP,
    DomainError,
    alpha_coefficient,
    alpha_gradient,
    cay,
    cay_vec,
    dcay_inv_dual,
    dexp_inv_dual,
    get_map,
    tau_rotate,
)
from depvi.so3 import E_X, E_Y, I3, hat, rodrigues_exp, vee

MAPS = [CAYLEY, EXP]
QUARTER_TURN = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])


def alpha_reference(t):
    """alpha(t) in 50-digit arithmetic."""
    with mpmath.workdps(50):
        t = mpmath.mpf(t)
        return float((1 - (t / 2) * mpmath.cot(t / 2)) / t**2)


def test_cay_values():
    np.testing.assert_array_equal(cay(np.zeros((3, 3))), I3)
    np.testing.assert_allclose(cay(hat((0.0, 0.0, 2.0))), QUARTER_TURN, atol=1e-15)
    w = np.array([0.3, -0.1, 0.7])
    np.testing.assert_allclose(cay(hat(w)) @ cay(hat(-w)), I3, atol=1e-15)


def test_cay_closed_form_matches_solve(rng):
    for _ in range(20):
        w = rng.normal(size=3) * 3
        np.testing.assert_allclose(cay_vec(w), cay(hat(w)), atol=1e-14)


def test_dcay_inv_dual_values():
    Pi = hat((1.0, -1.0, 2.0))
    np.testing.assert_array_equal(dcay_inv_dual(np.zeros((3, 3)), Pi), Pi)
    np.testing.assert_array_equal(dcay_inv_dual(hat((0.3, 0.2, 0.1)), np.zeros((3, 3))), np.zeros((3, 3)))


@pytest.mark.parametrize("tau_map", MAPS, ids=lambda m: m.name)
def test_dual_matches_finite_difference_oracle(tau_map):
    xi, p = np.array([0.01, 0.02, 0.03]), np.array([1.0, -1.0, 2.0])
    expected = dtau_inv_dual_fd(tau_map, xi, p)
    np.testing.assert_allclose(tau_map.dtau_inv_dual(xi, p), expected, atol=1e-7, rtol=0)
    M = tau_map.dtau_inv_dual_matrix(hat(xi), hat(p))
    np.testing.assert_allclose(M, -M.T, atol=1e-12)
    np.testing.assert_allclose(vee(M), expected, atol=1e-7, rtol=0)


@pytest.mark.parametrize("xi_scale", [0.5, 1.5, 2.5])
@pytest.mark.parametrize("tau_map", MAPS, ids=lambda m: m.name)
def test_dual_matches_oracle_at_large_steps(tau_map, xi_scale):
    xi = xi_scale * np.array([0.6, -0.48, 0.64])
    p = np.array([0.3, 2.0, -1.0])
    np.testing.assert_allclose(tau_map.dtau_inv_dual(xi, p), dtau_inv_dual_fd(tau_map, xi, p), atol=1e-7)


def test_dexp_inv_dual_values():
    Pi = hat((1.0, -1.0, 2.0))
    np.testing.assert_array_equal(dexp_inv_dual(np.zeros((3, 3)), Pi), Pi)
    # commuting arguments leave Pi unchanged
    np.testing.assert_allclose(dexp_inv_dual(hat((0.2, -0.2, 0.4)), Pi), Pi, atol=1e-15)


def test_alpha_values():
    assert alpha_coefficient(np.zeros(3)) == pytest.approx(1.0 / 12.0, abs=1e-17)
    assert alpha_coefficient(np.array([0.0, 0.0, math.pi])) == pytest.approx(1.0 / math.pi**2, abs=1e-15)
    assert alpha_coefficient(np.array([1.0, 0.0, 0.0])) == pytest.approx(alpha_reference(1.0), abs=1e-10)


@pytest.mark.parametrize("t", [1e-8, 1e-4, 1e-3, 0.05, 0.1, 0.5, 0.999, 1.0, 1.001, 3.0, 6.0])
def test_alpha_matches_high_precision(t):
    w = t * np.array([0.0, 0.6, 0.8])
    assert alpha_coefficient(w) == pytest.approx(alpha_reference(t), rel=1e-13)


@pytest.mark.parametrize("t", [1e-6, 1e-3, 0.1, 0.7, 0.999, 1.001, 2.0, 5.0])
def test_alpha_gradient_matches_high_precision(t):
    direction = np.array([0.48, -0.6, 0.64])
    w = t * direction
    with mpmath.workdps(50):
        slope = float(mpmath.diff(lambda s: (1 - (s / 2) * mpmath.cot(s / 2)) / s**2, mpmath.mpf(t)))
    np.testing.assert_allclose(alpha_gradient(w), slope * direction, rtol=1e-10, atol=1e-16)


@pytest.mark.parametrize("norm", [2 * math.pi, 7.0])
def test_alpha_rejects_pole(norm):
    with pytest.raises(DomainError):
        alpha_coefficient(np.array([norm, 0.0, 0.0]))


def test_exp_step_guard():
    EXP.check_step(np.array([0.0, 0.0, 3.14]))
    with pytest.raises(DomainError):
        EXP.tau(np.array([0.0, 0.0, math.pi]))
    with pytest.raises(DomainError):
        EXP.dtau_inv_dual(np.array([4.0, 0.0, 0.0]), np.ones(3))
    # the Cayley map has no such restriction
    CAYLEY.check_step(np.array([100.0, 0.0, 0.0]))


@pytest.mark.parametrize(
    "tau_map, xi, v, expected",
    [
        (CAYLEY, (0, 0, 0), (1.0, 2.0, 3.0), (1.0, 2.0, 3.0)),
        (EXP, (0, 0, 0), (1.0, 2.0, 3.0), (1.0, 2.0, 3.0)),
        (EXP, (0, 0, math.pi / 2), E_X, E_Y),
        (CAYLEY, (0, 0, 2.0), E_X, E_Y),
    ],
)
def test_tau_rotate(tau_map, xi, v, expected):
    np.testing.assert_allclose(tau_rotate(tau_map, np.array(xi, dtype=float), v), expected, atol=1e-15)


def test_cayley_is_second_order_approximation_of_exp():
    w = np.array([1.0, 2.0, 3.0])
    errs = [np.linalg.norm(cay_vec(h * w) - rodrigues_exp(h * w)) for h in (0.1, 0.05, 0.025)]
    for e0, e1 in zip(errs, errs[1:]):
        assert e0 / e1 == pytest.approx(8.0, rel=0.05)


def test_duals_agree_to_second_order():
    w, p = np.array([0.3, -0.4, 0.5]), np.array([1.0, 2.0, -1.0])
    np.testing.assert_array_equal(CAYLEY.dtau_inv_dual(0 * w, p), EXP.dtau_inv_dual(0 * w, p))
    diffs = [np.linalg.norm(CAYLEY.dtau_inv_dual(h * w, p) - EXP.dtau_inv_dual(h * w, p)) for h in (0.1, 0.05, 0.025)]
    for d0, d1 in zip(diffs, diffs[1:]):
        assert d0 / d1 == pytest.approx(4.0, rel=0.05)


def test_get_map():
    assert get_map("cayley") is CAYLEY
    assert get_map("Cay") is CAYLEY
    assert get_map("exp") is EXP
    with pytest.raises(ValueError):
        get_map("quaternion")


# --- properties ---------------------------------------------------------------

ball = small_vectors.filter(lambda v: np.linalg.norm(v) <= 1.0)


@pytest.mark.parametrize("tau_map", MAPS, ids=lambda m: m.name)
@given(xi=ball)
def test_tau_negative_is_inverse(tau_map, xi):
    np.testing.assert_allclose(tau_map.tau_of_negative(xi) @ tau_map.tau(xi), I3, atol=1e-12, rtol=0)
    np.testing.assert_allclose(tau_map.tau(np.zeros(3)), I3, atol=0)


@pytest.mark.parametrize("tau_map", MAPS, ids=lambda m: m.name)
@given(xi=ball, p=small_vectors)
def test_adjoint_identity_dual_form(tau_map, xi, p):
    # (dtau^{-1}_xi)^* p = tau(xi) (dtau^{-1}_{-xi})^* p
    lhs = tau_map.dtau_inv_dual(xi, p)
    rhs = tau_map.tau(xi) @ tau_map.dtau_inv_dual_negative(xi, p)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12, rtol=0)


@pytest.mark.parametrize("tau_map", MAPS, ids=lambda m: m.name)
@given(xi=ball, p=small_vectors)
def test_dual_vector_form_matches_matrix_form(tau_map, xi, p):
    M = tau_map.dtau_inv_dual_matrix(hat(xi), hat(p))
    np.testing.assert_allclose(M, hat(tau_map.dtau_inv_dual(xi, p)), atol=1e-12, rtol=0)


@pytest.mark.parametrize("tau_map", MAPS, ids=lambda m: m.name)
@given(xi=ball, v=small_vectors)
def test_tau_preserves_length(tau_map, xi, v):
    assert abs(np.linalg.norm(tau_rotate(tau_map, xi, v)) - np.linalg.norm(v)) <= 1e-13


@given(st.floats(min_value=0.0, max_value=6.2))
def test_alpha_is_increasing(t):
    assert alpha_coefficient(np.array([t, 0.0, 0.0])) >= 1.0 / 12.0 - 1e-17
