"""Underwater vehicle on SO(3) x R^3 with gravity and buoyancy.

Body-frame variables: angular velocity ``omega``, translational velocity
``nu``, position ``n = R^T q`` and the advected vertical ``a = R^T e_z``.
The rotational momentum balance of the discrete scheme is implicit in
``omega`` and is solved by Newton's method; everything else is explicit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import newton
from .group_maps import CAYLEY, EXP, GroupDifferenceMap, _alpha_of_angle, _alpha_slope_of_angle
from .so3 import E_Z, I3, cross, hat, modified_inertia, orthogonality_error

# Reference vehicle: m g = 1214.478 N against w_b = 1215.8 N, i.e. slightly buoyant
DEFAULT_MASS = 123.8
DEFAULT_ADDED_MASS = (65.0, 70.0, 75.0)
DEFAULT_INERTIA = (5.46, 5.29, 5.72)
DEFAULT_BUOYANCY = 1215.8
DEFAULT_GRAVITY = 9.81
DEFAULT_BUOYANCY_OFFSET = (0.0, 0.0, -0.007)


def _as_matrix(x, name: str) -> np.ndarray:
    M = np.array(x, dtype=float)
    if M.shape == (3,):
        M = np.diag(M)
    if M.shape != (3, 3):
        raise ValueError(f"{name} must be 3x3 or a diagonal triple")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} must be finite")
    return M


@dataclass(frozen=True)
class VehicleParams:
    """Physical constants of the vehicle.

    ``w_b`` is the buoyancy force rho |V| g in newtons. Derived members
    (``J_hat``, ``M_total`` and the inverses) are computed on construction.
    """

    m: float = DEFAULT_MASS
    M_A: np.ndarray = field(default_factory=lambda: np.diag(DEFAULT_ADDED_MASS))
    J: np.ndarray = field(default_factory=lambda: np.diag(DEFAULT_INERTIA))
    w_b: float = DEFAULT_BUOYANCY
    g: float = DEFAULT_GRAVITY
    r: np.ndarray = field(default_factory=lambda: np.array(DEFAULT_BUOYANCY_OFFSET))

    J_hat: np.ndarray = field(init=False, repr=False)
    M_total: np.ndarray = field(init=False, repr=False)
    J_inv: np.ndarray = field(init=False, repr=False)
    M_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        M_A = _as_matrix(self.M_A, "M_A")
        J = _as_matrix(self.J, "J")
        r = np.array(self.r, dtype=float)
        if r.shape != (3,) or not np.all(np.isfinite(r)):
            raise ValueError("r must be a finite 3-vector")
        for name in ("m", "w_b", "g"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.m > 0.0:
            raise ValueError("m > 0")
        if np.max(np.abs(M_A - M_A.T)) > 1e-12:
            raise ValueError("M_A must be symmetric")
        if np.max(np.abs(J - J.T)) > 1e-12:
            raise ValueError("J must be symmetric")
        if not np.all(np.linalg.eigvalsh(J) > 0.0):
            raise ValueError("J must be positive definite")
        M_total = self.m * I3 + M_A
        if not np.all(np.linalg.eigvalsh(M_total) > 0.0):
            raise ValueError("m I + M_A must be positive definite")
        object.__setattr__(self, "M_A", M_A)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "J_hat", modified_inertia(J))
        object.__setattr__(self, "M_total", M_total)
        object.__setattr__(self, "J_inv", np.linalg.inv(J))
        object.__setattr__(self, "M_inv", np.linalg.inv(M_total))

    @property
    def net_weight(self) -> float:
        """m g - w_b; positive means the vehicle sinks along +e_z."""
        return self.m * self.g - self.w_b


@dataclass(frozen=True)
class ReducedState:
    """Vehicle state at one time level.

    All fields refer to the same index k: ``omega`` and ``nu`` are the
    velocities that carry the state from t_k to t_{k+1}.
    """

    omega: np.ndarray
    nu: np.ndarray
    n: np.ndarray
    a: np.ndarray
    R: np.ndarray
    q: np.ndarray
    t: float = 0.0

    def invariant_errors(self) -> dict:
        return {
            "a_norm": abs(float(np.linalg.norm(self.a)) - 1.0),
            "orthogonality": orthogonality_error(self.R),
            "n_vs_q": float(np.max(np.abs(self.n - self.R.T @ self.q))),
        }

    def check_invariants(self, tol: float = 1e-10) -> None:
        for name, err in self.invariant_errors().items():
            if err > tol:
                raise ValueError(f"state invariant {name} violated by {err:.3e}")

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.omega, self.nu, self.n, self.a, self.R.ravel(), self.q])

    @classmethod
    def from_vector(cls, x, t: float = 0.0) -> "ReducedState":
        x = np.asarray(x, dtype=float)
        return cls(
            omega=x[0:3].copy(),
            nu=x[3:6].copy(),
            n=x[6:9].copy(),
            a=x[9:12].copy(),
            R=x[12:21].reshape(3, 3).copy(),
            q=x[21:24].copy(),
            t=t,
        )


@dataclass(frozen=True)
class StateDerivative:
    omega: np.ndarray
    nu: np.ndarray
    n: np.ndarray
    a: np.ndarray
    R: np.ndarray
    q: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.omega, self.nu, self.n, self.a, self.R.ravel(), self.q])


# --- continuous model -------------------------------------------------------


def continuous_rhs(state: ReducedState, p: VehicleParams) -> StateDerivative:
    """Time derivative of the continuous Euler-Poincare system."""
    w, nu, a = state.omega, state.nu, state.a
    Mnu = p.M_total @ nu
    torque = cross(p.J @ w, w) - p.w_b * cross(p.r, a) + cross(Mnu, nu)
    force = p.net_weight * a - cross(w, Mnu)
    return StateDerivative(
        omega=p.J_inv @ torque,
        nu=p.M_inv @ force,
        n=nu - cross(w, state.n),
        a=-cross(w, a),
        R=state.R @ hat(w),
        q=state.R @ nu,
    )


def kinetic_energy(omega, nu, p: VehicleParams) -> float:
    return 0.5 * float(nu @ (p.M_total @ nu)) + 0.5 * float(omega @ (p.J @ omega))


def potential_energy(n, a, p: VehicleParams) -> float:
    return -p.net_weight * float(n @ a) + p.w_b * float(p.r @ a)


def total_energy(state: ReducedState, p: VehicleParams) -> float:
    """K + U with K = 1/2 nu.(mI + M_A)nu + 1/2 w.Jw and U = -(mg - w_b)<n,a> + w_b<r,a>."""
    return kinetic_energy(state.omega, state.nu, p) + potential_energy(state.n, state.a, p)


# --- discrete momentum maps -------------------------------------------------


def cayley_momentum(omega, p: VehicleParams, h: float) -> np.ndarray:
    """Vectorized (dCay^{-1}_{h Omega})^* Pi for Pi = Jhat Omega + Omega Jhat.

    J w + h/2 w x Jw + h^2/4 (|w|^2 Jw + w x (w x Jw)). Passing ``-h``
    gives the momentum carried over from the previous step.
    """
    omega = np.asarray(omega, dtype=float)
    Jw = p.J @ omega
    wJw = cross(omega, Jw)
    return Jw + 0.5 * h * wJw + 0.25 * h * h * (float(omega @ omega) * Jw + cross(omega, wJw))


def exp_momentum(omega, p: VehicleParams, h: float) -> np.ndarray:
    """Vectorized (dexp^{-1}_{h Omega})^* Pi: J w + h/2 w x Jw + h^2 alpha(hw) w x (w x Jw)."""
    omega = np.asarray(omega, dtype=float)
    Jw = p.J @ omega
    wJw = cross(omega, Jw)
    alpha = _alpha_of_angle(abs(h) * math.sqrt(float(omega @ omega)))
    return Jw + 0.5 * h * wJw + h * h * alpha * cross(omega, wJw)


def forcing(nu, a, p: VehicleParams, h: float) -> np.ndarray:
    """Buoyancy torque and Munk moment over one step: h(-w_b r x a + (mI + M_A)nu x nu)."""
    return h * (cross(p.M_total @ nu, nu) - p.w_b * cross(p.r, a))


def rhs_cayley(omega_prev, nu, a, p: VehicleParams, h: float) -> np.ndarray:
    return cayley_momentum(omega_prev, p, -h) + forcing(nu, a, p, h)


def rhs_exp(omega_prev, nu, a, p: VehicleParams, h: float) -> np.ndarray:
    return exp_momentum(omega_prev, p, -h) + forcing(nu, a, p, h)


def residual_cayley(omega_next, rhs, p: VehicleParams, h: float) -> np.ndarray:
    return cayley_momentum(omega_next, p, h) - rhs


def residual_exp(omega_next, rhs, p: VehicleParams, h: float) -> np.ndarray:
    return exp_momentum(omega_next, p, h) - rhs


def _gyro_terms(omega, J):
    """Jw, g = w x Jw, S = W J - (Jw)^x and W S on Python floats, W = w^x.

    Working on floats avoids numpy overhead on 3x3 products, which
    dominates the cost of a step.
    """
    x, y, z = omega.tolist()
    (j00, j01, j02), (j10, j11, j12), (j20, j21, j22) = J.tolist()
    a = j00 * x + j01 * y + j02 * z
    b = j10 * x + j11 * y + j12 * z
    c = j20 * x + j21 * y + j22 * z
    g = (y * c - z * b, z * a - x * c, x * b - y * a)
    S = (
        (-z * j10 + y * j20, -z * j11 + y * j21 + c, -z * j12 + y * j22 - b),
        (z * j00 - x * j20 - c, z * j01 - x * j21, z * j02 - x * j22 + a),
        (-y * j00 + x * j10 + b, -y * j01 + x * j11 - a, -y * j02 + x * j12),
    )
    WS = tuple(
        tuple(r0 * S[0][k] + r1 * S[1][k] + r2 * S[2][k] for k in range(3))
        for r0, r1, r2 in ((0.0, -z, y), (z, 0.0, -x), (-y, x, 0.0))
    )
    return (x, y, z), (a, b, c), g, S, WS


def jacobian_cayley(omega, p: VehicleParams, h: float) -> np.ndarray:
    w, Jw, g, S, WS = _gyro_terms(np.asarray(omega, dtype=float), p.J)
    G = ((0.0, -g[2], g[1]), (g[2], 0.0, -g[0]), (-g[1], g[0], 0.0))
    c1, c2 = 0.5 * h, 0.25 * h * h
    ww = c2 * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
    # d(|w|^2 Jw)/dw = 2 Jw w^T + |w|^2 J
    quad = [
        [c1 * S[i][j] + c2 * (2.0 * Jw[i] * w[j] - G[i][j] + WS[i][j]) for j in range(3)] for i in range(3)
    ]
    return (1.0 + ww) * p.J + np.array(quad)


def jacobian_exp(omega, p: VehicleParams, h: float) -> np.ndarray:
    w, Jw, g, S, WS = _gyro_terms(np.asarray(omega, dtype=float), p.J)
    x, y, z = w
    G = ((0.0, -g[2], g[1]), (g[2], 0.0, -g[0]), (-g[1], g[0], 0.0))
    theta = abs(h) * math.sqrt(x * x + y * y + z * z)
    c1, c2 = 0.5 * h, h * h * _alpha_of_angle(theta)
    # d alpha(h w)/dw = h^2 (alpha'(t)/t) w with t = |h w|, times h^2 from the term
    c3 = h * h * h * h * _alpha_slope_of_angle(theta)
    v = (y * g[2] - z * g[1], z * g[0] - x * g[2], x * g[1] - y * g[0])
    rest = [
        [c1 * S[i][j] + c2 * (WS[i][j] - G[i][j]) + c3 * v[i] * w[j] for j in range(3)] for i in range(3)
    ]
    return p.J + np.array(rest)


_SCHEMES = {
    CAYLEY.name: (cayley_momentum, jacobian_cayley),
    EXP.name: (exp_momentum, jacobian_exp),
}


def momentum(tau_map: GroupDifferenceMap, omega, p: VehicleParams, h: float) -> np.ndarray:
    return _SCHEMES[tau_map.name][0](omega, p, h)


def residual(tau_map: GroupDifferenceMap, omega_next, rhs, p: VehicleParams, h: float) -> np.ndarray:
    return _SCHEMES[tau_map.name][0](omega_next, p, h) - rhs


def jacobian(tau_map: GroupDifferenceMap, omega, p: VehicleParams, h: float) -> np.ndarray:
    return _SCHEMES[tau_map.name][1](omega, p, h)


def momentum_rhs(tau_map: GroupDifferenceMap, omega_prev, nu, a, p: VehicleParams, h: float) -> np.ndarray:
    return _SCHEMES[tau_map.name][0](omega_prev, p, -h) + forcing(nu, a, p, h)


def matrix_form_residual(tau_map: GroupDifferenceMap, omega_next, omega_prev, nu, a, p: VehicleParams, h: float) -> np.ndarray:
    """Rotational equation assembled with skew matrices.

    Pi = Jhat Omega + Omega Jhat and the dual tangent maps act on matrices;
    the returned value is the skew matrix LHS - RHS. It must equal
    hat(residual) for the same inputs.
    """
    W1, W0 = hat(omega_next), hat(omega_prev)
    Pi1 = p.J_hat @ W1 + W1 @ p.J_hat
    Pi0 = p.J_hat @ W0 + W0 @ p.J_hat
    lhs = tau_map.dtau_inv_dual_matrix(h * W1, Pi1)
    rhs = (
        tau_map.dtau_inv_dual_matrix(-h * W0, Pi0)
        - h * p.w_b * hat(cross(p.r, a))
        + h * hat(cross(p.M_total @ nu, nu))
    )
    return lhs - rhs


# --- stepping ---------------------------------------------------------------


def advance(
    state: ReducedState,
    p: VehicleParams,
    tau_map: GroupDifferenceMap,
    h: float,
    solver: newton.SolverConfig | None = None,
) -> tuple[ReducedState, newton.SolveReport]:
    """One step of the discrete scheme plus the Newton report of its solve.

    With s_k = n_k + h nu_k and U = tau(-h Omega_k):
        n_{k+1} = U s_k,  a_{k+1} = U a_k,  R_{k+1} = R_k U^T,  q_{k+1} = R_k s_k
        (mI + M_A) nu_{k+1} = U (mI + M_A) nu_k + h (mg - w_b) a_{k+1}
    and omega_{k+1} solves the rotational momentum balance with initial
    guess omega_k.
    """
    solver = solver or newton.SolverConfig()
    if not h > 0.0:
        raise ValueError("h > 0")
    xi = h * state.omega
    U = tau_map.tau_of_negative(xi)
    s = state.n + h * state.nu
    n_next = U @ s
    a_next = U @ state.a
    R_next = state.R @ U.T
    q_next = state.R @ s
    nu_next = p.M_inv @ (U @ (p.M_total @ state.nu) + h * p.net_weight * a_next)

    f, jac = _SCHEMES[tau_map.name]
    rhs = f(state.omega, p, -h) + forcing(nu_next, a_next, p, h)
    report = newton.solve(
        lambda w: f(w, p, h) - rhs,
        lambda w: jac(w, p, h),
        state.omega,
        solver,
    )
    omega_next = report.root
    tau_map.check_step(h * omega_next)
    new = ReducedState(omega=omega_next, nu=nu_next, n=n_next, a=a_next, R=R_next, q=q_next, t=state.t + h)
    return new, report


def step_discrete(
    state: ReducedState,
    p: VehicleParams,
    tau_map: GroupDifferenceMap,
    h: float,
    solver: newton.SolverConfig | None = None,
) -> ReducedState:
    return advance(state, p, tau_map, h, solver)[0]


# --- initial data -----------------------------------------------------------


def _rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rot_x(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def euler_zxz(psi: float, theta: float, phi: float) -> np.ndarray:
    return _rot_z(psi) @ _rot_x(theta) @ _rot_z(phi)


def zxz_body_rates(theta: float, phi: float, psi_dot: float, theta_dot: float, phi_dot: float) -> np.ndarray:
    """Body angular velocity for R = Rz(psi) Rx(theta) Rz(phi)."""
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    return np.array(
        [
            psi_dot * st * sp + theta_dot * cp,
            psi_dot * st * cp - theta_dot * sp,
            psi_dot * ct + phi_dot,
        ]
    )


def init_from_euler(
    psi: float,
    theta: float,
    phi: float,
    psi_dot: float,
    theta_dot: float,
    phi_dot: float,
    q0,
    v0,
) -> ReducedState:
    """Initial state from ZXZ Euler angles/rates, spatial position and velocity."""
    values = (psi, theta, phi, psi_dot, theta_dot, phi_dot)
    if not all(math.isfinite(v) for v in values):
        raise ValueError("Euler angles and rates must be finite")
    R0 = euler_zxz(psi, theta, phi)
    q0 = np.array(q0, dtype=float)
    v0 = np.array(v0, dtype=float)
    return ReducedState(
        omega=zxz_body_rates(theta, phi, psi_dot, theta_dot, phi_dot),
        nu=R0.T @ v0,
        n=R0.T @ q0,
        a=R0.T @ E_Z,
        R=R0,
        q=q0,
        t=0.0,
    )


def default_initial_state() -> ReducedState:
    rate = 10.0 * math.pi / 180.0
    return init_from_euler(2 * math.pi, 0.0, 2 * math.pi, rate, rate, rate, (0.0, 0.0, 1.0), (0.1, 0.1, 0.8))
