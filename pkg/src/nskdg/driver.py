"""Time-stepping driver: initial data, diagnostics, and convergence sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .mesh import build_uniform
from .physics import PhysParams, energy, mass, momentum, steady_tanh
from .scheme import (SchemeConfig, StepAssembler, StepState, get_layout,
                     lift_gradient, sip_matrix)
from .solver import NewtonConfig, NonConvergence, newton_solve
from .space import DgSpace, FieldCoeffs, gauss_legendre, l2_project, lagrange_basis


# ---------------------------------------------------------------------------
# initial data


@dataclass(frozen=True)
class StepIC:
    """Piecewise-constant density jump with fluid at rest."""

    left: float = 1.1
    right: float = 1.9
    x_split: float = 0.5

    def profiles(self, phys: PhysParams):
        rho = lambda x: np.where(np.asarray(x) <= self.x_split, self.left,
                                 self.right)
        zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
        return rho, zero, zero


@dataclass(frozen=True)
class TanhSteady:
    """Smooth stationary phase transition (exact solution for mu = 0)."""

    def profiles(self, phys: PhysParams):
        rho = steady_tanh(phys.gamma)
        c = 2.0 * math.sqrt(2.0 * phys.gamma)
        grad = lambda x: -0.5 / c / np.cosh(np.asarray(x) / c) ** 2
        zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
        return rho, zero, grad


@dataclass(frozen=True)
class CustomIC:
    """User-supplied density/velocity profiles.

    ``grad_rho`` is only needed when the scheme initializes q by projection
    instead of the default discrete lifting.
    """

    rho: Callable
    v: Callable
    grad_rho: Callable | None = None

    def profiles(self, phys: PhysParams):
        return self.rho, self.v, self.grad_rho


# ---------------------------------------------------------------------------
# run configuration and results


@dataclass(frozen=True)
class RunConfig:
    domain: tuple[float, float]
    n_elems: int
    scheme: SchemeConfig
    T: float
    ic: object
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    record_every: int = 1

    def __post_init__(self):
        a, b = self.domain
        if not a < b:
            raise ValueError(f"empty domain ({a}, {b})")
        if self.n_elems < 1:
            raise ValueError(f"n_elems must be >= 1, got {self.n_elems}")
        if not self.T > 0:
            raise ValueError(f"T must be > 0, got {self.T}")
        if self.record_every < 1:
            raise ValueError(
                f"record_every must be >= 1, got {self.record_every}")


@dataclass
class DiagnosticsRow:
    """One recorded time level.

    ``energy_delta`` is the energy change since the previously recorded row
    and ``viscous_dissipation`` the viscous SIP work mu*k*B_h(vb, vb)
    accumulated over the same window, so for the conservative flux family the
    two columns should cancel up to solver tolerances.
    """

    t: float
    mass: float
    momentum: float
    energy: float
    energy_delta: float
    viscous_dissipation: float
    max_abs_velocity: float
    min_density: float
    newton_iters: int


@dataclass
class RunResult:
    final_state: StepState
    final_tau: FieldCoeffs
    rows: list


def n_time_steps(T: float, dt: float) -> int:
    """Number of steps covering [0, T] (guards k*n == T in floating point)."""
    return max(1, int(math.ceil(T / dt - 1e-9)))


def run(config: RunConfig, on_step: Callable | None = None) -> RunResult:
    """March the scheme from t = 0 to t = T.

    ``on_step(t, state, tau)`` is invoked at t = 0 and after every accepted
    step.  Diagnostics rows are recorded every ``record_every`` steps (t = 0
    and the final step always included).  On Newton failure the raised
    :class:`NonConvergence` carries the rows recorded so far in ``partial``.
    """
    a, b = config.domain
    scheme = config.scheme
    phys = scheme.phys
    mesh = build_uniform(a, b, config.n_elems)
    space = DgSpace(mesh, scheme.degree)
    layout = get_layout(space)

    rho_fn, v_fn, grad_fn = config.ic.profiles(phys)
    rho = l2_project(space, rho_fn)
    v = l2_project(space, v_fn)
    v.values[0] = 0.0
    v.values[-1] = 0.0
    if scheme.q0_init == "lift":
        q = lift_gradient(space, rho)
    else:
        if grad_fn is None:
            raise ValueError("q0_init='project' needs a density gradient "
                             "profile for the initial data")
        q = l2_project(space, grad_fn)
        q.values[0] = 0.0
        q.values[-1] = 0.0
    state = StepState(rho, v, q)
    # half-level potential is not defined at t = 0; report W'(rho) and use it
    # as the first Newton guess
    tau = FieldCoeffs(space, phys.well.wp(rho.values.copy()))

    assembler = StepAssembler(space, scheme)
    S = sip_matrix(space, scheme.sigma) if phys.mu > 0 else None
    dt = scheme.dt
    n_steps = n_time_steps(config.T, dt)

    def diagnostics(t, st, prev_energy, visc, iters):
        E = energy(st.rho, st.v, st.q, phys)
        rho_q = st.rho.at_quad()
        v_q = st.v.at_quad()
        return DiagnosticsRow(
            t=t, mass=mass(st.rho), momentum=momentum(st.rho, st.v),
            energy=E,
            energy_delta=0.0 if prev_energy is None else E - prev_energy,
            viscous_dissipation=visc,
            max_abs_velocity=float(np.abs(v_q).max()),
            min_density=float(rho_q.min()),
            newton_iters=iters)

    rows = [diagnostics(0.0, state, None, 0.0, 0)]
    if on_step is not None:
        on_step(0.0, state, tau)

    visc_window = 0.0
    iters_window = 0
    for n in range(1, n_steps + 1):
        guess = layout.pack(state.rho.elems, state.v.elems, tau.elems,
                            state.q.elems)
        try:
            u, rep = newton_solve(assembler, state, guess, config.newton)
        except NonConvergence as exc:
            exc.partial = RunResult(final_state=state, final_tau=tau,
                                    rows=rows)
            exc.aborted_step = n
            raise
        rho_a, v_a, tau_a, q_a = layout.unpack(u)
        if S is not None:
            vb = 0.5 * (state.v.elems + v_a).ravel()
            visc_window += phys.mu * dt * float(vb @ (S @ vb))
        state = StepState(FieldCoeffs(space, rho_a.ravel()),
                          FieldCoeffs(space, v_a.ravel()),
                          FieldCoeffs(space, q_a.ravel()))
        tau = FieldCoeffs(space, tau_a.ravel())
        iters_window += rep.iterations
        if on_step is not None:
            on_step(n * dt, state, tau)
        if n % config.record_every == 0 or n == n_steps:
            rows.append(diagnostics(n * dt, state, rows[-1].energy,
                                    visc_window, iters_window))
            visc_window = 0.0
            iters_window = 0

    return RunResult(final_state=state, final_tau=tau, rows=rows)


# ---------------------------------------------------------------------------
# errors against a known profile and mesh-refinement sweeps


class ErrorTracker:
    """Records max-in-time spatial L2 errors against exact profiles.

    The L2 norms use a Gauss-Legendre rule two points finer than the
    assembly quadrature; pass :meth:`update` as the driver's ``on_step``.
    """

    def __init__(self, space: DgSpace, rho_exact, v_exact):
        rule = gauss_legendre(space.quad.points.size + 2)
        self._basis = lagrange_basis(space.nodes_ref, rule.points)
        self._w = 0.5 * space.h * rule.weights
        x = space.elem_coords(np.arange(space.n_elems)[:, None],
                              rule.points[None, :])
        self._rho_ex = rho_exact(x)
        self._v_ex = v_exact(x)
        self.err_rho = 0.0
        self.err_v = 0.0

    def _l2(self, elems, exact):
        d = elems @ self._basis.T - exact
        return math.sqrt(float((d * d * self._w[None, :]).sum()))

    def update(self, t, state, tau):
        del t, tau
        self.err_rho = max(self.err_rho, self._l2(state.rho.elems,
                                                  self._rho_ex))
        self.err_v = max(self.err_v, self._l2(state.v.elems, self._v_ex))


@dataclass
class EocRow:
    n_elems: int
    err_rho: float
    eoc_rho: float
    err_v: float
    eoc_v: float


@dataclass
class EocTable:
    rows: list

    def to_csv_lines(self) -> list[str]:
        out = ["N,err_rho,eoc_rho,err_v,eoc_v"]
        for r in self.rows:
            out.append(f"{r.n_elems},{r.err_rho:.15e},{r.eoc_rho:.3f},"
                       f"{r.err_v:.15e},{r.eoc_v:.3f}")
        return out

    def to_text(self) -> str:
        lines = [f"{'N':>6} {'err_rho':>13} {'eoc':>6} {'err_v':>13} {'eoc':>6}"]
        for r in self.rows:
            lines.append(f"{r.n_elems:>6} {r.err_rho:>13.3e} {r.eoc_rho:>6.3f} "
                         f"{r.err_v:>13.3e} {r.eoc_v:>6.3f}")
        return "\n".join(lines)


def eoc_sweep(base: RunConfig, n_list) -> EocTable:
    """Refinement study against the stationary phase transition.

    Each level uses n elements and time step 1/n; levels must double.  The
    reported errors are max-in-time spatial L2 errors, so the expected
    order for degree 1 is 2.
    """
    n_list = list(n_list)
    if not n_list:
        raise ValueError("n_list must not be empty")
    for prev, cur in zip(n_list, n_list[1:]):
        if cur != 2 * prev:
            raise ValueError(f"n_list must double at each level, got "
                             f"{prev} -> {cur}")
    if not isinstance(base.ic, TanhSteady):
        raise ValueError("the refinement study needs the stationary "
                         "phase-transition initial data")

    rows = []
    for n in n_list:
        cfg = replace(base, n_elems=n,
                      scheme=replace(base.scheme, dt=1.0 / n))
        mesh = build_uniform(cfg.domain[0], cfg.domain[1], n)
        space = DgSpace(mesh, cfg.scheme.degree)
        rho_fn, v_fn, _ = cfg.ic.profiles(cfg.scheme.phys)
        tracker = ErrorTracker(space, rho_fn, v_fn)
        run(cfg, on_step=tracker.update)
        if rows:
            eoc_r = math.log2(rows[-1].err_rho / tracker.err_rho)
            eoc_v = math.log2(rows[-1].err_v / tracker.err_v)
        else:
            eoc_r = eoc_v = 0.0
        rows.append(EocRow(n_elems=n, err_rho=tracker.err_rho, eoc_rho=eoc_r,
                           err_v=tracker.err_v, eoc_v=eoc_v))
    return EocTable(rows=rows)
