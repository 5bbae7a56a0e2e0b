"""Slow, independent re-derivation of the discrete residual.

Everything here is computed from first principles with numpy.polynomial
objects and a fresh Gauss rule: per-element interpolating polynomials,
literal weak-form terms, Python loops over faces.  No assembly code from
the package is reused; only nodal layout conventions are shared.  The
double well is hardcoded in monomial form and the difference quotient is
the division-free bivariate expansion of (W(b) - W(a)) / (b - a).
"""

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss

# W(r) = 0.25 (r-1)^2 (r-2)^2 expanded, ascending monomial coefficients
WELL_C = (1.0, -3.0, 3.25, -1.5, 0.25)


def well_value(r):
    c = WELL_C
    return c[0] + r * (c[1] + r * (c[2] + r * (c[3] + r * c[4])))


def well_quotient_poly(pa, pb):
    """Bivariate quotient sum_k c_k sum_{i<k} a^i b^(k-1-i) as a Polynomial.

    Exact identity (W(b) - W(a)) = (b - a) * Q(a, b) for polynomial W; no
    division, so it stays accurate when the two states coincide.
    """
    out = Polynomial([0.0], domain=pa.domain, window=pa.window)
    for k in range(1, 5):
        ck = WELL_C[k]
        for i in range(k):
            out = out + ck * pa**i * pb**(k - 1 - i)
    return out


def elem_polys(space, coeffs_2d):
    """Interpolating Polynomial per element through the nodal values."""
    p = space.n_local - 1
    polys = []
    for e in range(space.n_elems):
        x = space.elem_coords(e, space.nodes_ref)
        polys.append(Polynomial.fit(x, coeffs_2d[e], p))
    return polys


class _Quad:
    def __init__(self, space):
        p = space.n_local - 1
        self.g, self.w = leggauss(4 * p + 4)

    def integrate(self, space, e, poly):
        x0 = space.elem_coords(e, np.array([-1.0]))[0]
        x1 = space.elem_coords(e, np.array([1.0]))[0]
        xm, hh = 0.5 * (x0 + x1), 0.5 * (x1 - x0)
        return hh * float((poly(xm + hh * self.g) * self.w).sum())


def _basis_polys(space, e):
    p = space.n_local - 1
    x = space.elem_coords(e, space.nodes_ref)
    out = []
    for j in range(p + 1):
        vals = np.zeros(p + 1)
        vals[j] = 1.0
        out.append(Polynomial.fit(x, vals, p))
    return out


def oracle_residual(space, dt, gamma, alpha, beta, mu, sigma,
                    rho_o, v_o, q_o, rho_n, v_n, tau, q_n):
    """Full (n_elems, p+1) residual blocks for the four coupled equations.

    All field arguments are (n_elems, p+1) nodal value arrays; tau is the
    half-level auxiliary unknown, the others carry old/new time levels.
    """
    N = space.n_elems
    m = space.n_local
    quad = _Quad(space)

    Pro = elem_polys(space, rho_o)
    Prn = elem_polys(space, rho_n)
    Pvo = elem_polys(space, v_o)
    Pvn = elem_polys(space, v_n)
    Pqo = elem_polys(space, q_o)
    Pqn = elem_polys(space, q_n)
    Pt = elem_polys(space, tau)

    R1 = np.zeros((N, m))
    R2 = np.zeros((N, m))
    R3 = np.zeros((N, m))
    R4 = np.zeros((N, m))

    for e in range(N):
        rb = 0.5 * (Pro[e] + Prn[e])
        vb = 0.5 * (Pvo[e] + Pvn[e])
        qb = 0.5 * (Pqo[e] + Pqn[e])
        half_sq = 0.5 * (Pvn[e] * Pvn[e] + Pvo[e] * Pvo[e])

        i1 = (Prn[e] - Pro[e]) / dt + (rb * vb).deriv()
        conv = (rb * vb * vb).deriv() - (rb * vb).deriv() * vb \
            - rb * (0.5 * vb * vb).deriv()
        i2 = rb * (Pvn[e] - Pvo[e]) / dt + conv + rb * Pt[e].deriv()
        i3 = Pt[e] - well_quotient_poly(Pro[e], Prn[e]) \
            + gamma * qb.deriv() - 0.5 * half_sq
        i4 = Pqn[e] - Prn[e].deriv()

        for j, phi in enumerate(_basis_polys(space, e)):
            R1[e, j] = quad.integrate(space, e, i1 * phi)
            R2[e, j] = quad.integrate(space, e, i2 * phi)
            R3[e, j] = quad.integrate(space, e, i3 * phi)
            R4[e, j] = quad.integrate(space, e, i4 * phi)

    # interior faces; the test trace pair for element e's basis phi is
    # (phi(x_f), 0) at its right face and (0, phi(x_f)) at its left face
    for f in range(N - 1):
        xf = space.elem_coords(f, np.array([1.0]))[0]
        rbL = 0.5 * (Pro[f](xf) + Prn[f](xf))
        rbR = 0.5 * (Pro[f + 1](xf) + Prn[f + 1](xf))
        vbL = 0.5 * (Pvo[f](xf) + Pvn[f](xf))
        vbR = 0.5 * (Pvo[f + 1](xf) + Pvn[f + 1](xf))
        qbL = 0.5 * (Pqo[f](xf) + Pqn[f](xf))
        qbR = 0.5 * (Pqo[f + 1](xf) + Pqn[f + 1](xf))
        tL, tR = Pt[f](xf), Pt[f + 1](xf)
        rnL, rnR = Prn[f](xf), Prn[f + 1](xf)

        j_rv = rbL * vbL - rbR * vbR
        j_tau = tL - tR
        j_vb = vbL - vbR
        j_qb = qbL - qbR
        j_rn = rnL - rnR

        for side, e in ((0, f), (1, f + 1)):
            for j, phi in enumerate(_basis_polys(space, e)):
                pv = phi(xf)
                avg_t = 0.5 * pv
                jmp_t = pv if side == 0 else -pv
                R1[e, j] += -j_rv * avg_t + alpha * j_tau * jmp_t
                avg_rt = 0.5 * (rbL if side == 0 else rbR) * pv
                R2[e, j] += -j_tau * avg_rt + beta * j_vb * jmp_t
                R3[e, j] += -gamma * j_qb * avg_t
                R4[e, j] += j_rn * avg_t

    if mu != 0.0:
        vbar = 0.5 * (v_o + v_n)
        for e in range(N):
            for j in range(m):
                R2[e, j] += mu * sip_bilinear_single(
                    space, vbar, (e, j), sigma)

    return R1, R2, R3, R4


def sip_bilinear(space, u_2d, w_2d, sigma):
    """Interior-penalty form by its definition, all faces incl. walls."""
    Pu = elem_polys(space, u_2d)
    Pw = elem_polys(space, w_2d)
    quad = _Quad(space)
    total = 0.0
    for e in range(space.n_elems):
        total += quad.integrate(space, e, Pu[e].deriv() * Pw[e].deriv())
    h = space.h
    faces = [(-1, 0)] + [(f, f + 1) for f in range(space.n_elems - 1)] \
        + [(space.n_elems - 1, space.n_elems)]
    for eL, eR in faces:
        if eL < 0:
            xf = space.elem_coords(0, np.array([-1.0]))[0]
            ju, jw = -Pu[eR](xf), -Pw[eR](xf)
            au, aw = Pu[eR].deriv()(xf), Pw[eR].deriv()(xf)
        elif eR == space.n_elems:
            xf = space.elem_coords(eL, np.array([1.0]))[0]
            ju, jw = Pu[eL](xf), Pw[eL](xf)
            au, aw = Pu[eL].deriv()(xf), Pw[eL].deriv()(xf)
        else:
            xf = space.elem_coords(eL, np.array([1.0]))[0]
            ju, jw = Pu[eL](xf) - Pu[eR](xf), Pw[eL](xf) - Pw[eR](xf)
            au = 0.5 * (Pu[eL].deriv()(xf) + Pu[eR].deriv()(xf))
            aw = 0.5 * (Pw[eL].deriv()(xf) + Pw[eR].deriv()(xf))
        total += -(aw * ju + au * jw) + (sigma / h) * ju * jw
    return total


def sip_bilinear_single(space, u_2d, test, sigma):
    """B_h(u, phi) for one local basis function, by definition."""
    e, j = test
    w_2d = np.zeros((space.n_elems, space.n_local))
    w_2d[e, j] = 1.0
    return sip_bilinear(space, u_2d, w_2d, sigma)


def random_state(space, rng, pin=True):
    """Random nodal fields; rho bounded away from vacuum, v/q wall-pinned."""
    N, m = space.n_elems, space.n_local
    rho = rng.uniform(0.5, 2.5, (N, m))
    v = rng.uniform(-1.0, 1.0, (N, m))
    tau = rng.uniform(-1.0, 1.0, (N, m))
    q = rng.uniform(-1.0, 1.0, (N, m))
    if pin:
        v[0, 0] = v[-1, -1] = 0.0
        q[0, 0] = q[-1, -1] = 0.0
    return rho, v, tau, q
