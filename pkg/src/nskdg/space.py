"""Broken polynomial spaces on 1D meshes.

Elements carry a nodal Lagrange basis on Gauss-Lobatto points, so traces at
element endpoints are single nodal values.  Integrals use a Gauss-Legendre
rule with 2p+2 points (exact through degree 4p+3), enough for the quartic
bulk free energy of a degree-p density to be integrated exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre as npleg

from .mesh import Face, Mesh1D


def gauss_lobatto_nodes(degree: int) -> np.ndarray:
    """The degree+1 Gauss-Lobatto points on [-1, 1], including both ends.

    Interior points are the roots of P'_degree (derivative of the Legendre
    polynomial), computed via the companion-matrix root finder of
    numpy.polynomial.
    """
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree}")
    if degree == 1:
        return np.array([-1.0, 1.0])
    coeffs = np.zeros(degree + 1)
    coeffs[degree] = 1.0
    interior = npleg.legroots(npleg.legder(coeffs))
    return np.concatenate(([-1.0], np.sort(interior), [1.0]))


def lagrange_basis(nodes: np.ndarray, x) -> np.ndarray:
    """Evaluate the Lagrange basis for ``nodes`` at points ``x``.

    Returns shape (len(x), len(nodes)); entry [q, j] is l_j(x_q).  Direct
    product formula, exact at the nodes themselves.
    """
    nodes = np.asarray(nodes, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = nodes.size
    out = np.ones((x.size, n))
    for j in range(n):
        for m in range(n):
            if m == j:
                continue
            out[:, j] *= (x - nodes[m]) / (nodes[j] - nodes[m])
    return out


def lagrange_basis_deriv(nodes: np.ndarray, x) -> np.ndarray:
    """First derivatives of the Lagrange basis at points ``x``.

    Returns shape (len(x), len(nodes)); entry [q, j] is l_j'(x_q).
    """
    nodes = np.asarray(nodes, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = nodes.size
    out = np.zeros((x.size, n))
    for j in range(n):
        for m in range(n):
            if m == j:
                continue
            term = np.ones(x.size) / (nodes[j] - nodes[m])
            for kk in range(n):
                if kk == j or kk == m:
                    continue
                term *= (x - nodes[kk]) / (nodes[j] - nodes[kk])
            out[:, j] += term
    return out


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if abs(self.weights.sum() - 2.0) > 1e-14:
            raise ValueError("quadrature weights must sum to 2 on [-1, 1]")


def gauss_legendre(n_points: int) -> QuadratureRule:
    pts, wts = npleg.leggauss(n_points)
    return QuadratureRule(points=pts, weights=wts)


class DgSpace:
    """Broken P_p space on a uniform 1D mesh with precomputed basis tables."""

    def __init__(self, mesh: Mesh1D, degree: int):
        if degree < 1:
            raise ValueError(f"degree must be >= 1, got {degree}")
        self.mesh = mesh
        self.degree = int(degree)
        self.n_local = self.degree + 1
        self.nodes_ref = gauss_lobatto_nodes(self.degree)
        self.quad = gauss_legendre(2 * self.degree + 2)
        # basis tables at quadrature points and at the reference endpoints
        self.basis_q = lagrange_basis(self.nodes_ref, self.quad.points)
        self.dbasis_q = lagrange_basis_deriv(self.nodes_ref, self.quad.points)
        self.dbasis_left = lagrange_basis_deriv(self.nodes_ref, [-1.0])[0]
        self.dbasis_right = lagrange_basis_deriv(self.nodes_ref, [1.0])[0]
        # reference mass matrix (no element Jacobian)
        w = self.quad.weights
        self.mass_ref = self.basis_q.T @ (w[:, None] * self.basis_q)
        self._sip_cache: dict[float, object] = {}

    @property
    def n_elems(self) -> int:
        return self.mesh.n_elems

    @property
    def n_dofs(self) -> int:
        return self.n_elems * self.n_local

    @property
    def h(self) -> float:
        return self.mesh.h

    def elem_coords(self, elem: int, ref_pts) -> np.ndarray:
        """Physical coordinates of reference points in one element."""
        ref_pts = np.atleast_1d(np.asarray(ref_pts, dtype=float))
        x0 = self.mesh.node_coords[elem]
        x1 = self.mesh.node_coords[elem + 1]
        return 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * ref_pts

    def all_quad_coords(self) -> np.ndarray:
        """Physical quadrature coordinates, shape (n_elems, n_q)."""
        mid = 0.5 * (self.mesh.node_coords[:-1] + self.mesh.node_coords[1:])
        return mid[:, None] + 0.5 * self.h * self.quad.points[None, :]


@dataclass
class FieldCoeffs:
    """Nodal coefficients of a broken-polynomial field.

    ``values`` is flat with length n_elems*(p+1); element K's nodal values
    occupy the contiguous slice [K*(p+1), (K+1)*(p+1)).
    """

    space: DgSpace
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).ravel()
        if self.values.size != self.space.n_dofs:
            raise ValueError(
                f"expected {self.space.n_dofs} coefficients, got {self.values.size}")

    @property
    def elems(self) -> np.ndarray:
        """(n_elems, p+1) view of the nodal values."""
        return self.values.reshape(self.space.n_elems, self.space.n_local)

    def eval(self, elem: int, ref_pts) -> np.ndarray:
        """Evaluate the field inside one element at reference points."""
        basis = lagrange_basis(self.space.nodes_ref, ref_pts)
        return basis @ self.elems[elem]

    def eval_grad(self, elem: int, ref_pts) -> np.ndarray:
        """Physical-space derivative inside one element at reference points."""
        dbasis = lagrange_basis_deriv(self.space.nodes_ref, ref_pts)
        return (dbasis @ self.elems[elem]) * (2.0 / self.space.h)

    def at_quad(self) -> np.ndarray:
        """Values at all quadrature points, shape (n_elems, n_q)."""
        return self.elems @ self.space.basis_q.T

    def grad_at_quad(self) -> np.ndarray:
        return (self.elems @ self.space.dbasis_q.T) * (2.0 / self.space.h)

    def copy(self) -> "FieldCoeffs":
        return FieldCoeffs(self.space, self.values.copy())


@dataclass(frozen=True)
class TracePair:
    """One-sided trace values at a face.

    ``inner`` comes from the side whose outward normal is ``normal`` (+1 for
    interior faces); ``outer`` is None at boundary faces.
    """

    inner: float
    outer: float | None
    normal: int


def trace(f: FieldCoeffs, face: Face) -> TracePair:
    """Trace pair of a field at a face (nodal endpoint values)."""
    vals = f.elems
    last = f.space.n_local - 1
    if face.is_boundary:
        if face.side == "left":
            return TracePair(inner=float(vals[face.elem, 0]), outer=None, normal=-1)
        return TracePair(inner=float(vals[face.elem, last]), outer=None, normal=+1)
    return TracePair(inner=float(vals[face.left_elem, last]),
                     outer=float(vals[face.right_elem, 0]),
                     normal=face.normal_left)


def jump_avg(tp: TracePair, is_vector: bool = False) -> tuple[float, float]:
    """(jump, average) of a trace pair.

    Interior faces: jump = inner*n + outer*(-n), average = (inner+outer)/2.
    Boundary faces: jump = inner*n, average = inner.  In 1D the scalar and
    vector conventions produce the same signed number, so ``is_vector`` only
    documents intent.
    """
    del is_vector
    if tp.outer is None:
        return tp.inner * tp.normal, tp.inner
    return (tp.inner - tp.outer) * tp.normal, 0.5 * (tp.inner + tp.outer)


def l2_project(space: DgSpace, fn) -> FieldCoeffs:
    """Elementwise L2 projection of a callable onto the broken space."""
    xq = space.all_quad_coords()
    fvals = np.asarray(fn(xq), dtype=float)
    if fvals.shape != xq.shape:
        fvals = np.broadcast_to(fvals, xq.shape)
    w = space.quad.weights
    # element Jacobian h/2 cancels between mass matrix and load vector
    load = (fvals * w[None, :]) @ space.basis_q
    try:
        coeffs = np.linalg.solve(space.mass_ref, load.T).T
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"singular local mass matrix: {exc}") from exc
    return FieldCoeffs(space, coeffs.ravel())
