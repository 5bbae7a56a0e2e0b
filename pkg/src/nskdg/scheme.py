"""Energy-consistent spatial/temporal discretization.

Four coupled fields are advanced per step: density rho, velocity v, the
half-level chemical potential tau, and the lifted density gradient q.  The
per-step nonlinear system couples one weak equation per field:

  mass         (rho^+ - rho)/k + d(rb vb)            + F1 faces
  momentum     rb (v^+ - v)/k + conv + rb d(tau)     + F2 faces + mu B_h(vb, .)
  potential    tau - WQ(rho, rho^+) + gamma d(qb)
                   - (|v^+|^2 + |v|^2)/4             + F3 faces
  lifting      q^+ - d(rho^+)                        + F4 faces (new level)

where b marks the half level (X + X^+)/2, WQ the exact double-well difference
quotient, and conv the convective block that cancels pointwise in 1D.  The
flux family F1..F4 is chosen so that total mass is conserved exactly and the
discrete energy changes only through the viscous SIP form B_h (plus the
optional interface dissipation alpha/beta).

Unknown vector layout (free coefficients, in this order): all rho, then v
without its two wall values, then tau, then q without its two wall values -
length 4*n_elems*(p+1) - 4.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _accel
from .physics import PhysParams
from .space import DgSpace, FieldCoeffs

if _accel.BACKEND == "numba":
    from . import _kernels_nb as kernels
else:
    from . import _kernels_np as kernels


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class FluxFamily:
    """Interface flux family.

    alpha = beta = 0 is the conservative family; positive alpha/beta add the
    interface dissipation terms alpha*jump(tau)*jump(.) to the mass flux and
    beta*jump(v)*jump(.) to the momentum flux.  These are the only families
    supported; in particular the fourth flux is always jump(rho)*avg(.) so the
    capillary energy condition holds.
    """

    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError(
                f"alpha/beta must be >= 0, got ({self.alpha}, {self.beta})")

    @property
    def kind(self) -> str:
        return "conservative" if self.alpha == 0.0 and self.beta == 0.0 \
            else "dissipative"

    @classmethod
    def conservative(cls) -> "FluxFamily":
        return cls(0.0, 0.0)

    @classmethod
    def dissipative(cls, alpha: float, beta: float) -> "FluxFamily":
        return cls(alpha, beta)


def sigma_min(degree: int) -> float:
    """Coercivity threshold for the SIP penalty."""
    return 10.0 * degree * degree


@dataclass(frozen=True)
class SchemeConfig:
    phys: PhysParams
    degree: int
    dt: float
    flux: FluxFamily = field(default_factory=FluxFamily)
    sigma: float | None = None
    q0_init: str = "lift"

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.sigma is None:
            object.__setattr__(self, "sigma", sigma_min(self.degree))
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.sigma < sigma_min(self.degree):
            raise ValueError(
                f"sigma={self.sigma} below coercivity threshold "
                f"{sigma_min(self.degree)} for degree {self.degree}")
        if self.q0_init not in ("lift", "project"):
            raise ValueError(f"q0_init must be lift|project, got {self.q0_init!r}")


# ---------------------------------------------------------------------------
# states and degree-of-freedom bookkeeping


@dataclass
class StepState:
    """One time level: density, velocity, lifted gradient (v, q wall-pinned)."""

    rho: FieldCoeffs
    v: FieldCoeffs
    q: FieldCoeffs

    def __post_init__(self):
        if self.v.space is not self.rho.space or self.q.space is not self.rho.space:
            raise ValueError("all fields must share one space")
        for name, f in (("v", self.v), ("q", self.q)):
            if f.values[0] != 0.0 or f.values[-1] != 0.0:
                raise ValueError(f"{name} must vanish at the domain walls")

    @property
    def space(self) -> DgSpace:
        return self.rho.space


class DofLayout:
    """Free-coefficient numbering: rho block, v block, tau block, q block."""

    def __init__(self, space: DgSpace):
        n, m = space.n_elems, space.n_local
        nd = n * m
        g = np.arange(nd, dtype=np.int64).reshape(n, m)
        pin = np.zeros((n, m), dtype=bool)
        pin[0, 0] = True
        pin[-1, -1] = True
        self.pinned = pin
        self.n_field = nd

        self.g_rho = g.copy()
        gv = np.full((n, m), -1, dtype=np.int64)
        gv[~pin] = nd + np.arange(nd - 2)
        self.g_v = gv
        self.g_tau = 2 * nd - 2 + g
        gq = np.full((n, m), -1, dtype=np.int64)
        gq[~pin] = 3 * nd - 2 + np.arange(nd - 2)
        self.g_q = gq
        self.total = 4 * nd - 4

        self._free_flat = np.flatnonzero(~pin.ravel())
        self._v_mask = gv.ravel() >= 0
        self.shape2d = (n, m)

    def pack(self, rho, v, tau, q) -> np.ndarray:
        u = np.empty(self.total)
        u[: self.n_field] = rho.ravel()
        u[self.g_v.ravel()[self._v_mask]] = v.ravel()[self._v_mask]
        u[self.g_tau.ravel()] = tau.ravel()
        u[self.g_q.ravel()[self._v_mask]] = q.ravel()[self._v_mask]
        return u

    def unpack(self, u: np.ndarray):
        nd = self.n_field
        rho = u[:nd].reshape(self.shape2d).copy()
        v = np.zeros(self.shape2d)
        v.ravel()[self._free_flat] = u[nd: 2 * nd - 2]
        tau = u[2 * nd - 2: 3 * nd - 2].reshape(self.shape2d).copy()
        q = np.zeros(self.shape2d)
        q.ravel()[self._free_flat] = u[3 * nd - 2:]
        return rho, v, tau, q

    def pack_residual(self, R1, R2, R3, R4) -> np.ndarray:
        return self.pack(R1, R2, R3, R4)


def get_layout(space: DgSpace) -> DofLayout:
    lay = getattr(space, "_dof_layout", None)
    if lay is None:
        lay = DofLayout(space)
        space._dof_layout = lay
    return lay


@dataclass
class UnknownVector:
    """Concatenated free coefficients (rho, v, tau, q) for one Newton solve."""

    space: DgSpace
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float).ravel()
        lay = get_layout(self.space)
        if self.data.size != lay.total:
            raise ValueError(
                f"expected {lay.total} free coefficients, got {self.data.size}")

    @classmethod
    def pack(cls, rho: FieldCoeffs, v: FieldCoeffs, tau: FieldCoeffs,
             q: FieldCoeffs) -> "UnknownVector":
        lay = get_layout(rho.space)
        return cls(rho.space, lay.pack(rho.elems, v.elems, tau.elems, q.elems))

    def fields(self):
        """(rho, v, tau, q) as FieldCoeffs, wall pins filled with zeros."""
        lay = get_layout(self.space)
        rho, v, tau, q = lay.unpack(self.data)
        return (FieldCoeffs(self.space, rho.ravel()),
                FieldCoeffs(self.space, v.ravel()),
                FieldCoeffs(self.space, tau.ravel()),
                FieldCoeffs(self.space, q.ravel()))


# ---------------------------------------------------------------------------
# interface fluxes (trace level; also used by the audit)

def _jump(t):
    return t[..., 0] - t[..., 1]


def _avg(t):
    return 0.5 * (t[..., 0] + t[..., 1])


def flux_f1(rho, v, tau, q, test, family: FluxFamily):
    """Mass interface flux: -jump(rho v) avg(test) + alpha jump(tau) jump(test)."""
    del q
    jrv = rho[..., 0] * v[..., 0] - rho[..., 1] * v[..., 1]
    return -jrv * _avg(test) + family.alpha * _jump(tau) * _jump(test)


def flux_f2(rho, v, tau, q, test, family: FluxFamily):
    """Momentum interface flux: -jump(tau) avg(rho test) + beta jump(v) jump(test)."""
    del q
    avg_rt = 0.5 * (rho[..., 0] * test[..., 0] + rho[..., 1] * test[..., 1])
    return -_jump(tau) * avg_rt + family.beta * _jump(v) * _jump(test)


def flux_f3(rho, v, tau, q, test, gamma: float):
    """Capillary interface flux: -gamma jump(q) avg(test)."""
    del rho, v, tau
    return -gamma * _jump(q) * _avg(test)


def flux_f4(rho, v, tau, q, test):
    """Gradient-lifting interface flux: +jump(rho) avg(test)."""
    del v, tau, q
    return _jump(rho) * _avg(test)


# ---------------------------------------------------------------------------
# symmetric interior penalty form


def sip_matrix(space: DgSpace, sigma: float) -> sp.csr_matrix:
    """Matrix of the SIP bilinear form on the full (unconstrained) nodal dofs.

    Interior and boundary faces are both assembled; under the wall constraint
    the boundary rows/columns act on pinned dofs or multiply zero jumps.
    """
    cached = space._sip_cache.get(sigma)
    if cached is not None:
        return cached
    n, m = space.n_elems, space.n_local
    h = space.h
    w = space.quad.weights
    D = space.dbasis_q

    stiff = (2.0 / h) * (D.T @ (w[:, None] * D))

    def penalty_block(J, A):
        return -(np.outer(A, J) + np.outer(J, A)) + (sigma / h) * np.outer(J, J)

    rows, cols, vals = [], [], []
    idx = np.arange(m)
    for e in range(n):
        rows.append(np.repeat(e * m + idx, m))
        cols.append(np.tile(e * m + idx, m))
        vals.append(stiff.ravel())

    if n > 1:
        J = np.concatenate([(idx == m - 1) * 1.0, (idx == 0) * -1.0])
        A = np.concatenate([space.dbasis_right, space.dbasis_left]) / h
        blk = penalty_block(J, A)
        loc = np.arange(2 * m)
        for f in range(n - 1):
            base = f * m
            rows.append(np.repeat(base + loc, 2 * m))
            cols.append(np.tile(base + loc, 2 * m))
            vals.append(blk.ravel())

    # boundary faces: jump(u) = u n, avg(grad u) = grad u (single-sided)
    J0 = (idx == 0) * -1.0
    A0 = (2.0 / h) * space.dbasis_left
    blk0 = penalty_block(J0, A0)
    rows.append(np.repeat(idx, m))
    cols.append(np.tile(idx, m))
    vals.append(blk0.ravel())

    J1 = (idx == m - 1) * 1.0
    A1 = (2.0 / h) * space.dbasis_right
    blk1 = penalty_block(J1, A1)
    base = (n - 1) * m
    rows.append(np.repeat(base + idx, m))
    cols.append(np.tile(base + idx, m))
    vals.append(blk1.ravel())

    nd = n * m
    S = sp.coo_matrix((np.concatenate(vals),
                       (np.concatenate(rows), np.concatenate(cols))),
                      shape=(nd, nd)).tocsr()
    space._sip_cache[sigma] = S
    return S


def sip_form(u: FieldCoeffs, w: FieldCoeffs, sigma: float) -> float:
    """Evaluate the SIP form B_h(u, w)."""
    if u.space is not w.space:
        raise ValueError("fields must share one space")
    S = sip_matrix(u.space, sigma)
    return float(u.values @ (S @ w.values))


# ---------------------------------------------------------------------------
# gradient lifting (also the default q0 initialization)


def lift_gradient(space: DgSpace, rho: FieldCoeffs) -> FieldCoeffs:
    """Solve the discrete lifting equation for q given rho.

    q is the wall-pinned field with (q, Z) = (d rho, Z) - sum_faces
    jump(rho) avg(Z) for all pinned test functions Z.
    """
    m = space.n_local
    w = space.quad.weights
    h = space.h
    load = 0.5 * h * ((rho.grad_at_quad() * w[None, :]) @ space.basis_q)
    re = rho.elems
    jr = re[:-1, m - 1] - re[1:, 0]
    load[:-1, m - 1] -= 0.5 * jr
    load[1:, 0] -= 0.5 * jr

    M = 0.5 * h * space.mass_ref
    q = np.linalg.solve(M, load.T).T
    # wall elements: re-solve with the pinned dof removed
    free0 = np.arange(1, m)
    q[0, :] = 0.0
    q[0, free0] = np.linalg.solve(M[np.ix_(free0, free0)], load[0, free0])
    free1 = np.arange(0, m - 1)
    q[-1, :] = 0.0
    q[-1, free1] = np.linalg.solve(M[np.ix_(free1, free1)], load[-1, free1])
    if space.n_elems == 1:
        # both pins sit in the single element
        freeb = np.arange(1, m - 1)
        q[0, :] = 0.0
        if freeb.size:
            q[0, freeb] = np.linalg.solve(M[np.ix_(freeb, freeb)], load[0, freeb])
    return FieldCoeffs(space, q.ravel())


# ---------------------------------------------------------------------------
# per-step assembly

# (equation, trial field) for the kernel block orderings; fields 0..3 are
# rho, v, tau, q and equations 0..3 are mass, momentum, potential, lifting
VOL_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1), (1, 2),
             (2, 0), (2, 1), (2, 2), (2, 3), (3, 0), (3, 3))
FACE_PAIRS = ((0, 0), (0, 1), (0, 2), (1, 0), (1, 2), (1, 1), (2, 3), (3, 0))


class StepAssembler:
    """Residual/Jacobian assembly for one scheme configuration.

    Precomputes the dof numbering, the sparse pattern of the Jacobian, and
    (for mu > 0) the SIP matrix, so per-iteration work is only the kernel
    sweep plus one sparse-matrix construction.
    """

    def __init__(self, space: DgSpace, cfg: SchemeConfig):
        if cfg.degree != space.degree:
            raise ValueError(
                f"config degree {cfg.degree} != space degree {space.degree}")
        self.space = space
        self.cfg = cfg
        self.layout = get_layout(space)
        self.B = np.ascontiguousarray(space.basis_q)
        self.D = np.ascontiguousarray(space.dbasis_q)
        self.w = np.ascontiguousarray(space.quad.weights)
        self.h = space.h
        self.S = sip_matrix(space, cfg.sigma) if cfg.phys.mu > 0 else None
        self._build_pattern()

    def _build_pattern(self):
        lay = self.layout
        n, m = lay.shape2d
        eq_g = (lay.g_rho, lay.g_v, lay.g_tau, lay.g_q)

        vol_rows = np.empty((n, len(VOL_PAIRS), m, m), dtype=np.int64)
        vol_cols = np.empty_like(vol_rows)
        for p, (E, F) in enumerate(VOL_PAIRS):
            vol_rows[:, p] = eq_g[E][:, :, None]
            vol_cols[:, p] = eq_g[F][:, None, :]

        nf = n - 1
        face_rows = np.empty((nf, len(FACE_PAIRS), 2, 2), dtype=np.int64)
        face_cols = np.empty_like(face_rows)
        for p, (E, F) in enumerate(FACE_PAIRS):
            face_rows[:, p, 0, :] = eq_g[E][:-1, m - 1][:, None]
            face_rows[:, p, 1, :] = eq_g[E][1:, 0][:, None]
            face_cols[:, p, :, 0] = eq_g[F][:-1, m - 1][:, None]
            face_cols[:, p, :, 1] = eq_g[F][1:, 0][:, None]

        rows = [vol_rows.ravel(), face_rows.ravel()]
        cols = [vol_cols.ravel(), face_cols.ravel()]
        self._sip_data = None
        if self.S is not None:
            C = self.S.tocoo()
            gv = lay.g_v.ravel()
            rows.append(gv[C.row])
            cols.append(gv[C.col])
            self._sip_data = 0.5 * self.cfg.phys.mu * C.data

        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        keep = (rows >= 0) & (cols >= 0)
        self._keep = keep
        self._rows = rows[keep]
        self._cols = cols[keep]

    # -- field preparation ---------------------------------------------------

    def _parts(self, old: StepState, u_data: np.ndarray):
        rho_n, v_n, tau, q_n = self.layout.unpack(u_data)
        return (old.rho.elems, old.v.elems, old.q.elems, rho_n, v_n, tau, q_n)

    def residual(self, old: StepState, u_data: np.ndarray) -> np.ndarray:
        cfg = self.cfg
        rho_o, v_o, q_o, rho_n, v_n, tau, q_n = self._parts(old, u_data)
        well = cfg.phys.well
        wq_q = well.quotient(rho_o @ self.B.T, rho_n @ self.B.T)
        R1, R2, R3, R4 = kernels.residual_cells_faces(
            rho_o, v_o, q_o, rho_n, v_n, q_n, tau, wq_q,
            self.B, self.D, self.w, self.h, cfg.dt, cfg.phys.gamma,
            cfg.flux.alpha, cfg.flux.beta)
        if self.S is not None:
            vb = 0.5 * (v_o + v_n)
            R2 += cfg.phys.mu * (self.S @ vb.ravel()).reshape(R2.shape)
        return self.layout.pack_residual(R1, R2, R3, R4)

    def jacobian(self, old: StepState, u_data: np.ndarray) -> sp.csc_matrix:
        cfg = self.cfg
        rho_o, v_o, q_o, rho_n, v_n, tau, q_n = self._parts(old, u_data)
        well = cfg.phys.well
        wq_db_q = well.quotient_db(rho_o @ self.B.T, rho_n @ self.B.T)
        vol, face = kernels.jacobian_cells_faces(
            rho_o, v_o, q_o, rho_n, v_n, q_n, tau, wq_db_q,
            self.B, self.D, self.w, self.h, cfg.dt, cfg.phys.gamma,
            cfg.flux.alpha, cfg.flux.beta)
        parts = [vol.ravel(), face.ravel()]
        if self._sip_data is not None:
            parts.append(self._sip_data)
        data = np.concatenate(parts)[self._keep]
        total = self.layout.total
        return sp.coo_matrix((data, (self._rows, self._cols)),
                             shape=(total, total)).tocsc()


def assemble_residual(old: StepState, guess: UnknownVector,
                      cfg: SchemeConfig) -> np.ndarray:
    """Residual of the per-step nonlinear system at ``guess`` (free dofs)."""
    return StepAssembler(old.space, cfg).residual(old, guess.data)


def assemble_jacobian(old: StepState, guess: UnknownVector,
                      cfg: SchemeConfig) -> sp.csc_matrix:
    """Analytic Jacobian of :func:`assemble_residual` at ``guess``."""
    return StepAssembler(old.space, cfg).jacobian(old, guess.data)


# ---------------------------------------------------------------------------
# flux-condition audit


@dataclass
class AuditReport:
    family: FluxFamily
    n_trials: int
    tol: float
    violations: dict
    passed: bool

    def lines(self) -> list[str]:
        out = [f"flux audit: {self.family.kind} family "
               f"(alpha={self.family.alpha}, beta={self.family.beta}), "
               f"{self.n_trials} random trace tuples, tol {self.tol:.1e}"]
        for name, v in self.violations.items():
            out.append(f"  {name:<18} max violation {v:.3e}")
        out.append("PASS" if self.passed else "FAIL")
        return out


def audit_flux_conditions(family: FluxFamily, n_trials: int = 100_000,
                          seed: int = 0, gamma: float = 1.0,
                          corrupt_for_testing: bool = False) -> AuditReport:
    """Check the algebraic mass/energy flux conditions on random traces.

    Conservative family: mass condition F1(.,1) = -jump(rho v) and both
    energy-condition sums vanish to 1e-13.  Dissipative family: the velocity
    energy sum may only be >= 0 and the capillary sum <= 0 (within 1e-13).
    Single-valued traces must give exactly zero fluxes (consistency).

    ``corrupt_for_testing`` perturbs F1 to exercise the negative control.
    """
    rng = np.random.default_rng(seed)
    tol = 1e-13

    def draw(lo, hi):
        return rng.uniform(lo, hi, size=(n_trials, 2))

    rho = draw(0.25, 3.0)
    v = draw(-2.0, 2.0)
    tau = draw(-2.0, 2.0)
    q = draw(-2.0, 2.0)
    drho = draw(-2.0, 2.0)

    def f1(test):
        base = flux_f1(rho, v, tau, q, test, family)
        if corrupt_for_testing:
            base = base + 1e-3 * _avg(tau) * _avg(test)
        return base

    ones = np.ones_like(rho)
    jrv = rho[:, 0] * v[:, 0] - rho[:, 1] * v[:, 1]
    mass_viol = float(np.abs(f1(ones) + jrv).max())

    jtv = rho[:, 0] * tau[:, 0] * v[:, 0] - rho[:, 1] * tau[:, 1] * v[:, 1]
    cond1 = f1(tau) + flux_f2(rho, v, tau, q, v, family) + jtv

    jdq = drho[:, 0] * q[:, 0] - drho[:, 1] * q[:, 1]
    cond2 = (flux_f3(rho, v, tau, q, drho, gamma)
             - gamma * _jump(drho) * _avg(q) + gamma * jdq)

    same = rng.uniform(0.25, 3.0, size=(n_trials // 10 + 1, 1)) \
        * np.ones((1, 2))
    sv = [flux_f1(same, same, same, same, same, family),
          flux_f2(same, same, same, same, same, family),
          flux_f3(same, same, same, same, same, gamma),
          flux_f4(same, same, same, same, same)]
    consistency = float(max(np.abs(x).max() for x in sv))

    if family.kind == "conservative":
        v1 = float(np.abs(cond1).max())
        v2 = float(np.abs(cond2).max())
    else:
        v1 = float(max(0.0, -cond1.min()))
        v2 = float(max(0.0, cond2.max()))

    violations = {
        "mass": mass_viol,
        "energy_velocity": v1,
        "energy_capillary": v2,
        "consistency": consistency,
    }
    passed = all(x <= tol for x in violations.values()) and consistency == 0.0
    return AuditReport(family=family, n_trials=n_trials, tol=tol,
                       violations=violations, passed=passed)
