"""Double-well thermodynamics, model parameters, and reference data.

The bulk free energy is the quartic double well

    W(rho) = scale * (rho - r1)^2 * (rho - r2)^2,

whose minima r1, r2 are the stable liquid/vapor densities.  Because W is a
quartic, the secant difference quotient (W(b) - W(a)) / (b - a) has the exact
midpoint Taylor form used by the time discretization; see
:meth:`DoubleWell.quotient`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .space import DgSpace, FieldCoeffs


@dataclass(frozen=True)
class DoubleWell:
    r1: float = 1.0
    r2: float = 2.0
    scale: float = 0.25

    def w(self, rho):
        return self.scale * (rho - self.r1) ** 2 * (rho - self.r2) ** 2

    def wp(self, rho):
        # with u = (rho-r1)(rho-r2): W' = 2*scale*u*u'
        u = (rho - self.r1) * (rho - self.r2)
        up = 2.0 * rho - self.r1 - self.r2
        return 2.0 * self.scale * u * up

    def wpp(self, rho):
        u = (rho - self.r1) * (rho - self.r2)
        up = 2.0 * rho - self.r1 - self.r2
        return 2.0 * self.scale * (up * up + 2.0 * u)

    def wppp(self, rho):
        return 12.0 * self.scale * (2.0 * rho - self.r1 - self.r2)

    @property
    def wpppp(self) -> float:
        return 24.0 * self.scale

    def quotient(self, a, b):
        """Exact difference quotient (W(b) - W(a)) / (b - a).

        Midpoint Taylor form W'(m) + W'''(m) (b-a)^2 / 24 with m = (a+b)/2,
        exact for quartic W and well-defined at a == b, where it reduces to
        W'(a).
        """
        m = 0.5 * (a + b)
        d = b - a
        return self.wp(m) + self.wppp(m) * d * d / 24.0

    def quotient_db(self, a, b):
        """Derivative of :meth:`quotient` with respect to its second argument."""
        m = 0.5 * (a + b)
        d = b - a
        return (0.5 * self.wpp(m)
                + self.wpppp * d * d / 48.0
                + self.wppp(m) * d / 12.0)


@dataclass(frozen=True)
class PhysParams:
    """Capillarity gamma > 0, viscosity mu >= 0 (mu = 0: inviscid), and the well."""

    gamma: float
    mu: float = 0.0
    well: DoubleWell = field(default_factory=DoubleWell)

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.mu < 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")


def pressure(well: DoubleWell, rho):
    """Thermodynamic pressure p = rho W'(rho) - W(rho)."""
    return rho * well.wp(rho) - well.w(rho)


def _quad_sum(space: DgSpace, integrand_q: np.ndarray) -> float:
    w = space.quad.weights
    return float(0.5 * space.h * (integrand_q * w[None, :]).sum())


def mass(rho: FieldCoeffs) -> float:
    """Total mass: integral of rho over the domain."""
    return _quad_sum(rho.space, rho.at_quad())


def momentum(rho: FieldCoeffs, v: FieldCoeffs) -> float:
    """Total momentum: integral of rho*v (diagnostic; not conserved)."""
    return _quad_sum(rho.space, rho.at_quad() * v.at_quad())


def energy(rho: FieldCoeffs, v: FieldCoeffs, q: FieldCoeffs,
           phys: PhysParams) -> float:
    """Total free + kinetic + capillary energy.

    E = integral of W(rho) + rho |v|^2 / 2 + gamma |q|^2 / 2, with q the
    lifted density gradient.
    """
    rq = rho.at_quad()
    vq = v.at_quad()
    qq = q.at_quad()
    dens = phys.well.w(rq) + 0.5 * rq * vq * vq + 0.5 * phys.gamma * qq * qq
    return _quad_sum(rho.space, dens)


def steady_tanh(gamma: float):
    """Planar interface equilibrium profile for the default well.

    rho(x) = 3/2 - tanh(x / (2 sqrt(2 gamma))) / 2, connecting the two well
    minima; an exact steady state with v = 0 on the real line.
    """
    width = 2.0 * np.sqrt(2.0 * gamma)

    def profile(x):
        return 1.5 - 0.5 * np.tanh(np.asarray(x, dtype=float) / width)

    return profile


def step_ic():
    """Riemann-type initial data: rho = 1.1 left of 0.5, 1.9 right; v = 0."""

    def rho0(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0.5, 1.1, 1.9)

    def v0(x):
        return np.zeros_like(np.asarray(x, dtype=float))

    return rho0, v0
