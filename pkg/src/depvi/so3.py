"""Linear algebra on R^3 and so(3).

Vectors are length-3 float arrays and matrices are 3x3 float arrays. The
hat map sends a vector w to the skew matrix w^x with w^x v = w x v.
"""

from __future__ import annotations

import math

import numpy as np

SKEW_TOL = 1e-12
SYM_TOL = 1e-12

E_X = np.array([1.0, 0.0, 0.0])
E_Y = np.array([0.0, 1.0, 0.0])
E_Z = np.array([0.0, 0.0, 1.0])
I3 = np.eye(3)


def _xyz(u):
    return u.tolist() if isinstance(u, np.ndarray) else [float(c) for c in u]


def cross(u, v) -> np.ndarray:
    # np.cross is several times slower than this on length-3 inputs
    u0, u1, u2 = _xyz(u)
    v0, v1, v2 = _xyz(v)
    return np.array([u1 * v2 - u2 * v1, u2 * v0 - u0 * v2, u0 * v1 - u1 * v0])


def hat(w) -> np.ndarray:
    """Skew-symmetric matrix of a 3-vector."""
    x, y, z = _xyz(w)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(W, tol: float = SKEW_TOL) -> np.ndarray:
    """Inverse of :func:`hat`.

    Raises ValueError if ``W`` is not skew-symmetric to within ``tol``.
    """
    W = np.asarray(W, dtype=float)
    if W.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {W.shape}")
    asym = np.max(np.abs(W + W.T))
    if asym > tol:
        raise ValueError(f"matrix is not skew-symmetric (max |W + W^T| = {asym:.3e})")
    return np.array([W[2, 1], W[0, 2], W[1, 0]])


def is_skew(W, tol: float = SKEW_TOL) -> bool:
    W = np.asarray(W, dtype=float)
    return W.shape == (3, 3) and bool(np.max(np.abs(W + W.T)) <= tol)


def pairing(A, B) -> float:
    """so(3) pairing 1/2 tr(A^T B); equals u . v for A = hat(u), B = hat(v)."""
    return 0.5 * float(np.trace(np.asarray(A).T @ np.asarray(B)))


def diamond(u, v) -> np.ndarray:
    """Diamond operator on R^3 x R^3, u <> v = (u x v)^x."""
    return hat(cross(u, v))


def bracket(A, B) -> np.ndarray:
    return A @ B - B @ A


def rodrigues_exp(w) -> np.ndarray:
    """Rotation matrix exp(w^x) by Rodrigues' formula."""
    w = np.asarray(w, dtype=float)
    theta2 = float(w @ w)
    theta = math.sqrt(theta2)
    if theta < 1e-4:
        a = 1.0 - theta2 / 6.0
        b = 0.5 - theta2 / 24.0
    else:
        a = math.sin(theta) / theta
        # 1 - cos(t) = 2 sin^2(t/2) avoids cancellation for small t
        s = math.sin(0.5 * theta)
        b = 2.0 * s * s / theta2
    W = hat(w)
    return I3 + a * W + b * (W @ W)


def modified_inertia(J) -> np.ndarray:
    """Modified inertia tensor 1/2 tr(J) I - J.

    With this tensor, 1/2 tr(W Jhat W^T) equals the kinetic energy 1/2 w.J w
    for W = hat(w).
    """
    J = np.asarray(J, dtype=float)
    if J.shape != (3, 3):
        raise ValueError(f"inertia must be 3x3, got shape {J.shape}")
    if np.max(np.abs(J - J.T)) > SYM_TOL:
        raise ValueError("inertia tensor must be symmetric")
    return 0.5 * np.trace(J) * I3 - J


def orthogonality_error(R) -> float:
    """Frobenius norm of R^T R - I."""
    R = np.asarray(R)
    return float(np.linalg.norm(R.T @ R - I3))


def polar_project(R) -> np.ndarray:
    """Nearest rotation matrix in the Frobenius norm."""
    U, _, Vt = np.linalg.svd(R)
    Q = U @ Vt
    if np.linalg.det(Q) < 0.0:
        U[:, -1] = -U[:, -1]
        Q = U @ Vt
    return Q
