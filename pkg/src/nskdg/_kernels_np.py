"""Vectorized numpy assembly kernels (fallback backend).

Both kernel backends share these contracts.  Nodal coefficient arrays have
shape (n_elems, p+1); ``B``/``D`` are the Lagrange basis values/reference
derivatives at the quadrature points, shape (n_q, p+1); ``w`` the reference
weights.  ``wq_q`` / ``wq_db_q`` carry the exact double-well difference
quotient (and its derivative w.r.t. the new density) pre-evaluated at the
quadrature points, so the well definition lives in one place.

Volume Jacobian blocks come back as (n_elems, 11, p+1, p+1) in the pair order

    0 (mass, rho)   1 (mass, v)
    2 (mom, rho)    3 (mom, v)     4 (mom, tau)
    5 (pot, rho)    6 (pot, v)     7 (pot, tau)   8 (pot, q)
    9 (lift, rho)  10 (lift, q)

face blocks as (n_faces_interior, 8, 2, 2) in the pair order

    0 (mass, rho)  1 (mass, v)  2 (mass, tau)
    3 (mom, rho)   4 (mom, tau) 5 (mom, v)
    6 (pot, q)     7 (lift, rho)

with rows/cols indexed (left-trace dof, right-trace dof).  The viscous SIP
contribution is added outside the kernels from a precomputed sparse matrix.
"""

from __future__ import annotations

import numpy as np


def residual_cells_faces(rho_o, v_o, q_o, rho_n, v_n, q_n, tau, wq_q,
                         B, D, w, h, k, gamma, alpha, beta):
    dj = 2.0 / h
    Bt, Dt = B.T, D.T

    ro = rho_o @ Bt
    rn = rho_n @ Bt
    vo = v_o @ Bt
    vn = v_n @ Bt
    qn = q_n @ Bt
    tq = tau @ Bt
    drb = 0.5 * (rho_o + rho_n) @ Dt * dj
    drn = rho_n @ Dt * dj
    dvb = 0.5 * (v_o + v_n) @ Dt * dj
    dqb = 0.5 * (q_o + q_n) @ Dt * dj
    dtq = tau @ Dt * dj

    rb = 0.5 * (ro + rn)
    vb = 0.5 * (vo + vn)

    i1 = (rn - ro) / k + (drb * vb + rb * dvb)
    # convective block div(rho v v) - div(rho v) v - rho grad(v^2)/2, which
    # cancels pointwise in 1D; assembled literally term by term
    conv = (drb * vb * vb + 2.0 * rb * vb * dvb) \
        - (drb * vb + rb * dvb) * vb - rb * vb * dvb
    i2 = rb * (vn - vo) / k + conv + rb * dtq
    i3 = tq - wq_q + gamma * dqb - 0.25 * (vn * vn + vo * vo)
    i4 = qn - drn

    scale = 0.5 * h * w
    R1 = (i1 * scale) @ B
    R2 = (i2 * scale) @ B
    R3 = (i3 * scale) @ B
    R4 = (i4 * scale) @ B

    last = B.shape[1] - 1
    rbL = 0.5 * (rho_o[:-1, last] + rho_n[:-1, last])
    rbR = 0.5 * (rho_o[1:, 0] + rho_n[1:, 0])
    vbL = 0.5 * (v_o[:-1, last] + v_n[:-1, last])
    vbR = 0.5 * (v_o[1:, 0] + v_n[1:, 0])
    qbL = 0.5 * (q_o[:-1, last] + q_n[:-1, last])
    qbR = 0.5 * (q_o[1:, 0] + q_n[1:, 0])

    jrv = rbL * vbL - rbR * vbR
    jtau = tau[:-1, last] - tau[1:, 0]
    jvb = vbL - vbR
    jqb = qbL - qbR
    jrn = rho_n[:-1, last] - rho_n[1:, 0]

    R1[:-1, last] += -0.5 * jrv + alpha * jtau
    R1[1:, 0] += -0.5 * jrv - alpha * jtau
    R2[:-1, last] += -0.5 * jtau * rbL + beta * jvb
    R2[1:, 0] += -0.5 * jtau * rbR - beta * jvb
    R3[:-1, last] += -0.5 * gamma * jqb
    R3[1:, 0] += -0.5 * gamma * jqb
    R4[:-1, last] += 0.5 * jrn
    R4[1:, 0] += 0.5 * jrn

    return R1, R2, R3, R4


def jacobian_cells_faces(rho_o, v_o, q_o, rho_n, v_n, q_n, tau, wq_db_q,
                         B, D, w, h, k, gamma, alpha, beta):
    n_el, n_loc = rho_o.shape
    n_q = w.shape[0]
    dj = 2.0 / h
    Bt, Dt = B.T, D.T
    Dphys = D * dj

    vo = v_o @ Bt
    vn = v_n @ Bt
    drb = 0.5 * (rho_o + rho_n) @ Dt * dj
    dvb = 0.5 * (v_o + v_n) @ Dt * dj
    dtq = tau @ Dt * dj
    rb = 0.5 * (rho_o + rho_n) @ Bt
    vb = 0.5 * (vo + vn)

    ones = np.ones((n_el, n_q))
    # trial-side basis coefficient per volume pair (test side is always B);
    # the convective-block derivatives cancel pointwise in 1D and are omitted
    cBB = np.stack([
        1.0 / k + 0.5 * dvb,          # 0 (mass, rho)
        0.5 * drb,                    # 1 (mass, v)
        0.5 * (vn - vo) / k + 0.5 * dtq,  # 2 (mom, rho)
        rb / k,                       # 3 (mom, v)
        np.zeros((n_el, n_q)),        # 4 (mom, tau): pure gradient coupling
        -wq_db_q,                     # 5 (pot, rho)
        -0.5 * vn,                    # 6 (pot, v)
        ones,                         # 7 (pot, tau)
        np.zeros((n_el, n_q)),        # 8 (pot, q): pure gradient coupling
        np.zeros((n_el, n_q)),        # 9 (lift, rho): pure gradient coupling
        ones,                         # 10 (lift, q)
    ], axis=1)
    cBD = np.stack([
        0.5 * vb,                     # 0
        0.5 * rb,                     # 1
        np.zeros((n_el, n_q)),        # 2
        np.zeros((n_el, n_q)),        # 3
        rb,                           # 4
        np.zeros((n_el, n_q)),        # 5
        np.zeros((n_el, n_q)),        # 6
        np.zeros((n_el, n_q)),        # 7
        0.5 * gamma * ones,           # 8
        -ones,                        # 9
        np.zeros((n_el, n_q)),        # 10
    ], axis=1)

    scale = 0.5 * h * w
    vol = np.einsum("kpq,qi,qj->kpij", cBB * scale, B, B, optimize=True)
    vol += np.einsum("kpq,qi,qj->kpij", cBD * scale, B, Dphys, optimize=True)

    last = n_loc - 1
    nf = n_el - 1
    face = np.zeros((nf, 8, 2, 2))
    if nf:
        rbL = 0.5 * (rho_o[:-1, last] + rho_n[:-1, last])
        rbR = 0.5 * (rho_o[1:, 0] + rho_n[1:, 0])
        vbL = 0.5 * (v_o[:-1, last] + v_n[:-1, last])
        vbR = 0.5 * (v_o[1:, 0] + v_n[1:, 0])
        jtau = tau[:-1, last] - tau[1:, 0]

        # 0 (mass, rho): -jump(rb vb) avg(test)
        face[:, 0, :, 0] = (-0.25 * vbL)[:, None]
        face[:, 0, :, 1] = (0.25 * vbR)[:, None]
        # 1 (mass, v)
        face[:, 1, :, 0] = (-0.25 * rbL)[:, None]
        face[:, 1, :, 1] = (0.25 * rbR)[:, None]
        # 2 (mass, tau): alpha jump(tau) jump(test)
        face[:, 2, 0, 0] = alpha
        face[:, 2, 0, 1] = -alpha
        face[:, 2, 1, 0] = -alpha
        face[:, 2, 1, 1] = alpha
        # 3 (mom, rho): -jump(tau) avg(rb test), test side selects trial side
        face[:, 3, 0, 0] = -0.25 * jtau
        face[:, 3, 1, 1] = -0.25 * jtau
        # 4 (mom, tau): -jump(tau) avg(rb test) differentiated in tau
        face[:, 4, 0, 0] = -0.5 * rbL
        face[:, 4, 0, 1] = 0.5 * rbL
        face[:, 4, 1, 0] = -0.5 * rbR
        face[:, 4, 1, 1] = 0.5 * rbR
        # 5 (mom, v): beta jump(vb) jump(test)
        face[:, 5, 0, 0] = 0.5 * beta
        face[:, 5, 0, 1] = -0.5 * beta
        face[:, 5, 1, 0] = -0.5 * beta
        face[:, 5, 1, 1] = 0.5 * beta
        # 6 (pot, q): -gamma jump(qb) avg(test)
        face[:, 6, :, 0] = -0.25 * gamma
        face[:, 6, :, 1] = 0.25 * gamma
        # 7 (lift, rho): +jump(rho_n) avg(test)
        face[:, 7, :, 0] = 0.5
        face[:, 7, :, 1] = -0.5

    return vol, face
