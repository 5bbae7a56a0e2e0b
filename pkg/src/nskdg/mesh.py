"""Uniform 1D meshes and their faces."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Mesh1D:
    a: float
    b: float
    n_elems: int
    node_coords: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n_elems

    def widths(self) -> np.ndarray:
        return np.diff(self.node_coords)


@dataclass(frozen=True)
class Face:
    """A mesh face (element endpoint).

    ``left_elem`` / ``right_elem`` are the element indices on the x^- / x^+
    side; exactly one of them is None for a boundary face.  ``normal_left``
    is the outward normal of the inner side: +1 for interior faces (left
    element's outward normal), -1 at the left domain boundary and +1 at the
    right one.
    """

    coord: float
    normal_left: int
    left_elem: int | None
    right_elem: int | None

    @property
    def is_boundary(self) -> bool:
        return self.left_elem is None or self.right_elem is None

    @property
    def elem(self) -> int:
        # the single adjacent element of a boundary face
        if not self.is_boundary:
            raise ValueError("interior face has two elements")
        return self.right_elem if self.left_elem is None else self.left_elem

    @property
    def side(self) -> str:
        if not self.is_boundary:
            raise ValueError("interior face has no side")
        return "left" if self.left_elem is None else "right"


def build_uniform(a: float, b: float, n_elems: int) -> Mesh1D:
    """Build a uniform mesh of ``n_elems`` elements on [a, b]."""
    if n_elems < 1:
        raise ValueError(f"n_elems must be >= 1, got {n_elems}")
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    coords = np.linspace(a, b, n_elems + 1)
    return Mesh1D(a=float(a), b=float(b), n_elems=int(n_elems), node_coords=coords)


def faces(mesh: Mesh1D) -> list[Face]:
    """All faces sorted by coordinate: left boundary, interiors, right boundary."""
    out = [Face(coord=float(mesh.node_coords[0]), normal_left=-1,
                left_elem=None, right_elem=0)]
    for f in range(1, mesh.n_elems):
        out.append(Face(coord=float(mesh.node_coords[f]), normal_left=+1,
                        left_elem=f - 1, right_elem=f))
    out.append(Face(coord=float(mesh.node_coords[-1]), normal_left=+1,
                    left_elem=mesh.n_elems - 1, right_elem=None))
    return out
