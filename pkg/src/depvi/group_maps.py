"""Group difference maps tau: so(3) -> SO(3).

Two instances are provided, the Cayley transform and the exponential map.
Besides tau itself, the discrete scheme needs the dual of the inverse
right-trivialized tangent, (dtau^{-1}_xi)^* Pi.  It is available both in
matrix form (acting on skew matrices) and in vector form (acting on the
3-vectors the skew matrices represent); the stepper uses the vector form.

For Pi = hat(p) and xi in R^3 the vector forms are

    Cayley:  p + 1/2 xi x p + 1/4 (xi . p) xi
    exp:     p + 1/2 xi x p + alpha(|xi|) xi x (xi x p)

with alpha(t) = (1 - t/2 cot(t/2)) / t^2.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .so3 import I3, bracket, cross, hat, rodrigues_exp

ALPHA_SERIES_CUTOFF = 1.0

# |B_2n| for n = 1..12; alpha(t) = sum_n |B_2n| / (2n)! t^(2n-2)
_BERNOULLI = [
    Fraction(1, 6), Fraction(1, 30), Fraction(1, 42), Fraction(1, 30),
    Fraction(5, 66), Fraction(691, 2730), Fraction(7, 6), Fraction(3617, 510),
    Fraction(43867, 798), Fraction(174611, 330), Fraction(854513, 138), Fraction(236364091, 2730),
]
# coefficients of t^(2j) in alpha(t) and in alpha'(t)/t, lowest order first
_ALPHA_COEFFS = [float(b / math.factorial(2 * n)) for n, b in enumerate(_BERNOULLI, start=1)]
_SLOPE_COEFFS = [float((2 * n - 2) * b / math.factorial(2 * n)) for n, b in enumerate(_BERNOULLI, start=1)][1:]


def _horner(coeffs, x: float) -> float:
    out = 0.0
    for c in reversed(coeffs):
        out = out * x + c
    return out


class DomainError(ValueError):
    """Argument outside the region where a map is a valid group difference map."""


def cay(Omega) -> np.ndarray:
    """Cayley transform (I - Omega/2)^{-1} (I + Omega/2)."""
    Omega = np.asarray(Omega, dtype=float)
    return np.linalg.solve(I3 - 0.5 * Omega, I3 + 0.5 * Omega)


def cay_vec(xi) -> np.ndarray:
    """Closed form of cay(hat(xi)): I + 4/(4 + |xi|^2) (X + X^2/2)."""
    X = hat(xi)
    c = 4.0 / (4.0 + float(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]))
    return I3 + c * (X + 0.5 * (X @ X))


def dcay_inv_dual(hOmega, Pi) -> np.ndarray:
    """(dcay^{-1}_{hOmega})^* Pi = (I + hOmega/2) Pi (I - hOmega/2)."""
    hOmega = np.asarray(hOmega, dtype=float)
    Pi = np.asarray(Pi, dtype=float)
    return (I3 + 0.5 * hOmega) @ Pi @ (I3 - 0.5 * hOmega)


def _alpha_of_angle(theta: float) -> float:
    if theta >= 2.0 * math.pi:
        raise DomainError(
            f"alpha is singular for |w| >= 2 pi (got |w| = {theta:.6g}); reduce the step size"
        )
    t2 = theta * theta
    if theta < ALPHA_SERIES_CUTOFF:
        return _horner(_ALPHA_COEFFS, t2)
    half = 0.5 * theta
    return (1.0 - half / math.tan(half)) / t2


def _alpha_slope_of_angle(theta: float) -> float:
    # alpha'(t) / t, so that grad_w alpha(|w|) = (alpha'(t)/t) * w
    if theta >= 2.0 * math.pi:
        raise DomainError(f"alpha is singular for |w| >= 2 pi (got |w| = {theta:.6g})")
    t2 = theta * theta
    if theta < ALPHA_SERIES_CUTOFF:
        # the closed form below loses ~eps/t^4 to cancellation
        return _horner(_SLOPE_COEFFS, t2)
    half = 0.5 * theta
    s = math.sin(half)
    bracket_term = t2 / (4.0 * s * s) - 2.0 + half / math.tan(half)
    return bracket_term / (t2 * t2)


def alpha_coefficient(w) -> float:
    """(1 - |w|/2 cot(|w|/2)) / |w|^2, extended continuously by 1/12 at 0."""
    w = np.asarray(w, dtype=float)
    return _alpha_of_angle(math.sqrt(float(w @ w)))


def alpha_gradient(w) -> np.ndarray:
    """Gradient of :func:`alpha_coefficient` with respect to ``w``."""
    w = np.asarray(w, dtype=float)
    return _alpha_slope_of_angle(math.sqrt(float(w @ w))) * w


def dexp_inv_dual(hOmega, Pi) -> np.ndarray:
    """(dexp^{-1}_{hOmega})^* Pi = Pi + 1/2 [hOmega, Pi] + alpha [hOmega, [hOmega, Pi]].

    alpha is evaluated at the norm of the vector of ``hOmega``.
    """
    hOmega = np.asarray(hOmega, dtype=float)
    Pi = np.asarray(Pi, dtype=float)
    xi = np.array([hOmega[2, 1], hOmega[0, 2], hOmega[1, 0]])
    alpha = alpha_coefficient(xi)
    inner = bracket(hOmega, Pi)
    return Pi + 0.5 * inner + alpha * bracket(hOmega, inner)


class GroupDifferenceMap:
    """Common interface of the Cayley and exponential maps.

    All arguments are 3-vectors: ``xi`` stands for the algebra element
    hat(xi) (already scaled by the step size) and ``p`` for the momentum
    hat(p).
    """

    name = ""

    def tau(self, xi) -> np.ndarray:
        raise NotImplementedError

    def tau_of_negative(self, xi) -> np.ndarray:
        return self.tau(-np.asarray(xi, dtype=float))

    def dtau_inv_dual(self, xi, p) -> np.ndarray:
        raise NotImplementedError

    def dtau_inv_dual_negative(self, xi, p) -> np.ndarray:
        return self.dtau_inv_dual(-np.asarray(xi, dtype=float), p)

    def dtau_inv_dual_matrix(self, Xi, Pi) -> np.ndarray:
        raise NotImplementedError

    def check_step(self, xi) -> None:
        """Raise DomainError if ``xi`` is outside the admissible step region."""

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupDifferenceMap) and other.name == self.name

    def __hash__(self) -> int:
        return hash(self.name)


class CayleyMap(GroupDifferenceMap):
    name = "cayley"

    def tau(self, xi) -> np.ndarray:
        return cay_vec(xi)

    def dtau_inv_dual(self, xi, p) -> np.ndarray:
        return p + 0.5 * cross(xi, p) + 0.25 * float(xi[0] * p[0] + xi[1] * p[1] + xi[2] * p[2]) * xi

    def dtau_inv_dual_matrix(self, Xi, Pi) -> np.ndarray:
        return dcay_inv_dual(Xi, Pi)


class ExpMap(GroupDifferenceMap):
    """Exponential map, restricted to |xi| < pi.

    The restriction keeps steps inside the injectivity radius and at half
    the distance to the pole of alpha at 2 pi.
    """

    name = "exp"
    max_angle = math.pi

    def check_step(self, xi) -> None:
        theta = math.sqrt(float(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]))
        if not theta < self.max_angle:
            raise DomainError(
                f"exp step |h w| = {theta:.6g} is not below pi; reduce the step size"
            )

    def tau(self, xi) -> np.ndarray:
        self.check_step(xi)
        return rodrigues_exp(xi)

    def dtau_inv_dual(self, xi, p) -> np.ndarray:
        self.check_step(xi)
        theta = math.sqrt(float(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]))
        xp = cross(xi, p)
        return p + 0.5 * xp + _alpha_of_angle(theta) * cross(xi, xp)

    def dtau_inv_dual_matrix(self, Xi, Pi) -> np.ndarray:
        Xi = np.asarray(Xi, dtype=float)
        self.check_step(np.array([Xi[2, 1], Xi[0, 2], Xi[1, 0]]))
        return dexp_inv_dual(Xi, Pi)


CAYLEY = CayleyMap()
EXP = ExpMap()

_MAPS = {"cayley": CAYLEY, "cay": CAYLEY, "exp": EXP}


def get_map(name: str) -> GroupDifferenceMap:
    try:
        return _MAPS[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown group difference map {name!r}; expected 'cayley' or 'exp'") from None


def tau_rotate(tau_map: GroupDifferenceMap, xi, v) -> np.ndarray:
    """Apply tau(hat(xi)) to the vector ``v``."""
    return tau_map.tau(np.asarray(xi, dtype=float)) @ np.asarray(v, dtype=float)
