"""Trajectory drivers and diagnostics.

``run_discrete`` integrates the variational scheme and records energy,
the Kelvin-Noether quantity and drift norms. ``run_rk4`` integrates the
continuous equations with classical RK4 and serves as the reference for
``convergence_study``.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import newton
from .group_maps import CAYLEY, EXP, GroupDifferenceMap
from .so3 import I3, cross, polar_project
from .vehicle import ReducedState, VehicleParams, advance, continuous_rhs, total_energy


class SimulationError(RuntimeError):
    """A step of the discrete scheme failed; ``step`` is the index being computed."""

    def __init__(self, step: int, cause: Exception):
        super().__init__(f"step {step} failed: {cause}")
        self.step = step
        self.cause = cause


@dataclass(frozen=True)
class TrajectoryRecord:
    t: float
    omega: np.ndarray
    nu: np.ndarray
    n: np.ndarray
    a: np.ndarray
    q: np.ndarray
    E: float
    I_kn: float
    rot_drift: float
    a_norm_err: float


@dataclass
class RunSummary:
    steps: int
    max_rel_energy_err: float
    max_rel_kn_err: float
    max_rot_drift: float
    max_a_norm_err: float
    solver_iter_histogram: dict = field(default_factory=dict)
    wall_time: float = 0.0
    max_abs_energy_err: float = 0.0
    max_abs_kn_err: float = 0.0
    E0: float = 0.0
    I0: float = 0.0


@dataclass
class RunResult:
    records: list
    summary: RunSummary
    final: ReducedState


def kelvin_noether_quantity(state: ReducedState, p: VehicleParams, tau_map: GroupDifferenceMap, h: float) -> float:
    """e_z-component of R_k((dtau^{-1}_{h Omega_k})^* Pi_k - 1/h ((mI + M_A)(s_k - n_k) x s_k)^x) R_k^T.

    Uses s_k - n_k = h nu_k, so the second term is (mI + M_A) nu_k x s_k.
    """
    s = state.n + h * state.nu
    body = tau_map.dtau_inv_dual(h * state.omega, p.J @ state.omega) - cross(p.M_total @ state.nu, s)
    # vee(R A R^T) = R vee(A); only the third row of R is needed
    return float(state.R[2] @ body)


def continuous_kelvin_noether(state: ReducedState, p: VehicleParams) -> float:
    """<e_z, R (J w - (mI + M_A) nu x n)>, the h -> 0 limit of the discrete quantity."""
    return float(state.R[2] @ (p.J @ state.omega - cross(p.M_total @ state.nu, state.n)))


def _rot_drift(R: np.ndarray) -> float:
    D = R.T @ R - I3
    return math.sqrt(float(np.sum(D * D)))


def relative_error(x: float, x0: float) -> float:
    return abs(x - x0) / max(1.0, abs(x0))


def step_count(T: float, h: float) -> int:
    if not h > 0.0:
        raise ValueError("h > 0")
    if not T > 0.0:
        raise ValueError("T > 0")
    return int(round(T / h))


def _record(state: ReducedState, t: float, E: float, I: float, rot: float, anorm: float) -> TrajectoryRecord:
    return TrajectoryRecord(
        t=t,
        omega=state.omega,
        nu=state.nu,
        n=state.n,
        a=state.a,
        q=state.q,
        E=E,
        I_kn=I,
        rot_drift=rot,
        a_norm_err=anorm,
    )


def run_discrete(
    p: VehicleParams,
    initial: ReducedState,
    tau_map: GroupDifferenceMap,
    h: float,
    T: float,
    solver: newton.SolverConfig | None = None,
    record_stride: int = 1,
) -> RunResult:
    """Integrate N = round(T/h) steps, recording every ``record_stride``-th step.

    Step 0 and step N are always recorded. Summary maxima are taken over
    every step, not only the recorded ones.
    """
    solver = solver or newton.SolverConfig()
    if record_stride < 1:
        raise ValueError("record_stride >= 1")
    N = step_count(T, h)
    t0 = initial.t
    start = time.perf_counter()

    state = initial
    E0 = total_energy(state, p)
    I0 = kelvin_noether_quantity(state, p, tau_map, h)
    rot0 = _rot_drift(state.R)
    an0 = abs(math.sqrt(float(state.a @ state.a)) - 1.0)
    records = [_record(state, t0, E0, I0, rot0, an0)]
    max_dE = max_dI = 0.0
    max_rot, max_an = rot0, an0
    iters: Counter = Counter()

    for k in range(1, N + 1):
        try:
            state, report = advance(state, p, tau_map, h, solver)
        except (newton.SolverError, ValueError) as exc:
            raise SimulationError(k, exc) from exc
        iters[report.iterations] += 1
        E = total_energy(state, p)
        I = kelvin_noether_quantity(state, p, tau_map, h)
        rot = _rot_drift(state.R)
        an = abs(math.sqrt(float(state.a @ state.a)) - 1.0)
        max_dE = max(max_dE, abs(E - E0))
        max_dI = max(max_dI, abs(I - I0))
        max_rot = max(max_rot, rot)
        max_an = max(max_an, an)
        if k % record_stride == 0 or k == N:
            records.append(_record(state, t0 + k * h, E, I, rot, an))

    summary = RunSummary(
        steps=N,
        max_rel_energy_err=max_dE / max(1.0, abs(E0)),
        max_rel_kn_err=max_dI / max(1.0, abs(I0)),
        max_rot_drift=max_rot,
        max_a_norm_err=max_an,
        solver_iter_histogram=dict(sorted(iters.items())),
        wall_time=time.perf_counter() - start,
        max_abs_energy_err=max_dE,
        max_abs_kn_err=max_dI,
        E0=E0,
        I0=I0,
    )
    return RunResult(records=records, summary=summary, final=state)


def evolve(
    p: VehicleParams,
    initial: ReducedState,
    tau_map: GroupDifferenceMap,
    h: float,
    T: float,
    solver: newton.SolverConfig | None = None,
) -> ReducedState:
    """Final state of the discrete scheme at time T, without diagnostics."""
    state = initial
    for k in range(1, step_count(T, h) + 1):
        try:
            state = advance(state, p, tau_map, h, solver)[0]
        except (newton.SolverError, ValueError) as exc:
            raise SimulationError(k, exc) from exc
    return state


# --- continuous reference ---------------------------------------------------


def _rhs_vec(x: np.ndarray, p: VehicleParams) -> np.ndarray:
    return continuous_rhs(ReducedState.from_vector(x), p).as_vector()


def rk4_step(state: ReducedState, p: VehicleParams, h: float) -> ReducedState:
    """Classical RK4 on (omega, nu, n, a, R, q); R is polar-projected afterwards."""
    x = state.as_vector()
    k1 = _rhs_vec(x, p)
    k2 = _rhs_vec(x + 0.5 * h * k1, p)
    k3 = _rhs_vec(x + 0.5 * h * k2, p)
    k4 = _rhs_vec(x + h * k3, p)
    x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    new = ReducedState.from_vector(x, t=state.t + h)
    return ReducedState(new.omega, new.nu, new.n, new.a, polar_project(new.R), new.q, new.t)


def run_rk4(p: VehicleParams, initial: ReducedState, h: float, T: float) -> ReducedState:
    state = initial
    for _ in range(step_count(T, h)):
        state = rk4_step(state, p, h)
    return state


def rk4_energy_error(p: VehicleParams, initial: ReducedState, h: float, T: float) -> float:
    """Max |E(t) - E(0)| along an RK4 trajectory."""
    E0 = total_energy(initial, p)
    state, worst = initial, 0.0
    for _ in range(step_count(T, h)):
        state = rk4_step(state, p, h)
        worst = max(worst, abs(total_energy(state, p) - E0))
    return worst


# --- comparisons ------------------------------------------------------------


def state_difference(x: ReducedState, y: ReducedState) -> float:
    """Max absolute component difference over omega, nu, n, a, R and q."""
    return float(np.max(np.abs(x.as_vector() - y.as_vector())))


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    error: float


@dataclass
class ConvergenceTable:
    rows: list
    h_ref: float
    T: float

    @property
    def orders(self) -> list:
        """Observed order between each pair of consecutive rows (None when undefined)."""
        out = []
        for r0, r1 in zip(self.rows, self.rows[1:]):
            if r0.error > 0.0 and r1.error > 0.0:
                out.append(math.log(r0.error / r1.error) / math.log(r0.h / r1.h))
            else:
                out.append(None)
        return out

    @property
    def observed_order(self) -> float | None:
        """Smallest pairwise order; None if every error is zero."""
        finite = [o for o in self.orders if o is not None]
        return min(finite) if finite else None

    @property
    def max_error(self) -> float:
        return max(r.error for r in self.rows)


def convergence_study(
    p: VehicleParams,
    initial: ReducedState,
    tau_map: GroupDifferenceMap,
    T: float,
    h_list,
    solver: newton.SolverConfig | None = None,
    h_ref: float | None = None,
) -> ConvergenceTable:
    """Global error at time T of the discrete scheme against an RK4 reference.

    The reference step defaults to min(h_list) / 20.
    """
    h_list = [float(h) for h in h_list]
    if len(h_list) < 2:
        raise ValueError("a convergence study needs at least two step sizes")
    if any(h1 >= h0 for h0, h1 in zip(h_list, h_list[1:])):
        raise ValueError("h_list must be strictly descending")
    h_ref = h_ref if h_ref is not None else min(h_list) / 20.0
    for h in h_list + [h_ref]:
        N = step_count(T, h)
        if abs(N * h - T) > 1e-9 * max(1.0, T):
            raise ValueError(f"T = {T} is not a whole number of steps of size {h}")
    reference = run_rk4(p, initial, h_ref, T)
    rows = [ConvergenceRow(h, state_difference(evolve(p, initial, tau_map, h, T, solver), reference)) for h in h_list]
    return ConvergenceTable(rows=rows, h_ref=h_ref, T=T)


def map_difference(
    p: VehicleParams,
    initial: ReducedState,
    h: float,
    T: float,
    solver: newton.SolverConfig | None = None,
) -> float:
    """Max component difference at time T between the Cayley and exp trajectories."""
    return state_difference(evolve(p, initial, CAYLEY, h, T, solver), evolve(p, initial, EXP, h, T, solver))


def energy_error_max(
    p: VehicleParams,
    initial: ReducedState,
    tau_map: GroupDifferenceMap,
    h: float,
    T: float,
    solver: newton.SolverConfig | None = None,
) -> float:
    return run_discrete(p, initial, tau_map, h, T, solver, record_stride=step_count(T, h)).summary.max_rel_energy_err
