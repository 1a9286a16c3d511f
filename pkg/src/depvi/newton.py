"""Newton iteration for small square nonlinear systems."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

Residual = Callable[[np.ndarray], np.ndarray]
Jacobian = Callable[[np.ndarray], np.ndarray]

MAX_CONDITION = 1e14


class SolverError(RuntimeError):
    pass


class NonConvergence(SolverError):
    def __init__(self, message: str, iterations: int, residual_norm: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual_norm = residual_norm


class SingularJacobian(SolverError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-12
    max_iterations: int = 50
    fd_epsilon: float = 1e-6
    damping: float = 1.0

    def __post_init__(self):
        if not self.tolerance > 0.0:
            raise ValueError("solver tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.fd_epsilon > 0.0:
            raise ValueError("fd_epsilon must be > 0")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")


@dataclass(frozen=True)
class SolveReport:
    root: np.ndarray
    iterations: int
    final_residual_norm: float
    converged: bool


def _norm(r: np.ndarray) -> float:
    return float(np.sqrt(r @ r))


def _norm1(M: np.ndarray) -> float:
    """Matrix 1-norm (max column abs sum); NaN entries give NaN."""
    sums = [sum(map(abs, col)) for col in zip(*M.tolist())]
    # Python's max silently skips NaN depending on position
    return max(sums) if sum(sums) == sum(sums) else math.nan


def solve(residual: Residual, jacobian: Jacobian, x0, cfg: SolverConfig | None = None) -> SolveReport:
    """Find a root of ``residual`` by Newton's method.

    The residual is checked before the first update, so an exact initial
    guess returns after zero iterations. Each update solves the Jacobian
    system by LU with partial pivoting.
    """
    cfg = cfg or SolverConfig()
    x = np.array(x0, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("initial guess must be finite")
    r = residual(x)
    rnorm = _norm(r)
    iterations = 0
    while not rnorm <= cfg.tolerance:
        if iterations >= cfg.max_iterations:
            raise NonConvergence(
                f"Newton did not converge in {cfg.max_iterations} iterations "
                f"(|residual| = {rnorm:.3e})",
                iterations,
                rnorm,
            )
        Jx = jacobian(x)
        try:
            Jinv = np.linalg.inv(Jx)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(f"Jacobian decomposition failed: {exc}") from exc
        cond = _norm1(Jx) * _norm1(Jinv)
        if not cond <= MAX_CONDITION:
            raise SingularJacobian(f"Jacobian condition estimate {cond:.3e} exceeds {MAX_CONDITION:.0e}")
        x = x - cfg.damping * (Jinv @ r)
        r = residual(x)
        rnorm = _norm(r)
        iterations += 1
        if not np.isfinite(rnorm):
            raise NonConvergence("residual became non-finite", iterations, rnorm)
    return SolveReport(root=x, iterations=iterations, final_residual_norm=rnorm, converged=True)


def fd_jacobian(residual: Residual, x, eps: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian."""
    x = np.asarray(x, dtype=float)
    n = x.size
    cols = []
    for j in range(n):
        dx = np.zeros(n)
        dx[j] = eps
        cols.append((residual(x + dx) - residual(x - dx)) / (2.0 * eps))
    return np.column_stack(cols)


def verify_jacobian(residual: Residual, jacobian: Jacobian, x, fd_epsilon: float = 1e-6) -> float:
    """Max absolute entry of jacobian(x) minus its central-difference estimate."""
    if not fd_epsilon > 0.0:
        raise ValueError("fd_epsilon must be > 0")
    return float(np.max(np.abs(jacobian(np.asarray(x, dtype=float)) - fd_jacobian(residual, x, fd_epsilon))))
