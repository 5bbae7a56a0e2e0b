"""Newton solver for the per-step nonlinear system."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class SingularLinearSystem(Exception):
    """The step Jacobian could not be factorized (or gave non-finite values)."""


class NonConvergence(Exception):
    """Newton failed to reach the tolerance.

    Carries ``report`` and ``last_iterate``; the time-stepping driver attaches
    ``partial`` (the rows recorded so far) and ``aborted_step`` before
    re-raising.
    """

    def __init__(self, message, report=None, last_iterate=None):
        super().__init__(message)
        self.report = report
        self.last_iterate = last_iterate
        self.partial = None
        self.aborted_step = None


@dataclass(frozen=True)
class NewtonConfig:
    """Newton iteration controls.

    ``polish`` extra full steps are taken after the tolerance is met, keeping
    the best iterate.  Near the solution each full step squares the residual,
    so one polish step pushes a just-converged iterate to the rounding floor;
    this is what keeps the per-step mass defect at machine precision instead
    of at ``tol``.
    """

    tol: float = 1e-10
    max_iters: int = 50
    damping: float = 1.0
    polish: int = 1

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not 0 < self.damping <= 1:
            raise ValueError(f"damping must be in (0, 1], got {self.damping}")
        if self.polish < 0:
            raise ValueError(f"polish must be >= 0, got {self.polish}")


@dataclass
class SolveReport:
    iterations: int
    final_residual_norm: float
    converged: bool
    linear_solves: int
    residual_history: list = field(default_factory=list)


def linear_solve(matrix, rhs: np.ndarray) -> np.ndarray:
    """Solve one sparse linear system via LU factorization."""
    A = matrix if sp.issparse(matrix) else sp.csc_matrix(np.asarray(matrix))
    A = A.tocsc()
    try:
        lu = spla.splu(A)
        x = lu.solve(np.asarray(rhs, dtype=float))
    except RuntimeError as exc:
        raise SingularLinearSystem(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularLinearSystem("factorization produced non-finite values")
    return x


def newton_solve(assembler, old, guess: np.ndarray,
                 cfg: NewtonConfig) -> tuple[np.ndarray, SolveReport]:
    """Solve the per-step system starting from ``guess`` (free dofs).

    Plain Newton with the analytic Jacobian and optional damping; the
    residual is measured in the max norm.  Raises :class:`NonConvergence`
    after ``max_iters`` updates or on a non-finite residual.
    """
    u = np.array(guess, dtype=float)
    r = assembler.residual(old, u)
    rnorm = float(np.abs(r).max())
    history = [rnorm]
    iters = 0
    lin = 0

    def report(converged):
        return SolveReport(iterations=iters, final_residual_norm=rnorm,
                           converged=converged, linear_solves=lin,
                           residual_history=list(history))

    while rnorm > cfg.tol:
        if not np.isfinite(rnorm):
            raise NonConvergence("residual became non-finite",
                                 report=report(False), last_iterate=u)
        if iters >= cfg.max_iters:
            raise NonConvergence(
                f"no convergence in {cfg.max_iters} iterations "
                f"(residual {rnorm:.3e}, tol {cfg.tol:.3e})",
                report=report(False), last_iterate=u)
        du = linear_solve(assembler.jacobian(old, u), -r)
        lin += 1
        iters += 1
        u = u + cfg.damping * du
        r = assembler.residual(old, u)
        rnorm = float(np.abs(r).max())
        history.append(rnorm)

    for _ in range(cfg.polish):
        if rnorm == 0.0:
            break
        du = linear_solve(assembler.jacobian(old, u), -r)
        lin += 1
        u_try = u + du
        r_try = assembler.residual(old, u_try)
        rnorm_try = float(np.abs(r_try).max())
        if not np.isfinite(rnorm_try) or rnorm_try >= rnorm:
            break
        iters += 1
        u, r, rnorm = u_try, r_try, rnorm_try
        history.append(rnorm)

    return u, report(True)
