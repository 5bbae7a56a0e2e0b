"""Numba-compiled assembly kernels (hot path).

Same signatures, argument conventions, and block orderings as
``_kernels_np``; see that module's docstring.  The loops here are fused per
element so each quadrature evaluation is consumed in place.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def residual_cells_faces(rho_o, v_o, q_o, rho_n, v_n, q_n, tau, wq_q,
                         B, D, w, h, k, gamma, alpha, beta):
    n_el, n_loc = rho_o.shape
    n_q = w.shape[0]
    dj = 2.0 / h

    R1 = np.zeros((n_el, n_loc))
    R2 = np.zeros((n_el, n_loc))
    R3 = np.zeros((n_el, n_loc))
    R4 = np.zeros((n_el, n_loc))

    for e in range(n_el):
        for q in range(n_q):
            ro = 0.0
            rn = 0.0
            vo = 0.0
            vn = 0.0
            qn = 0.0
            tq = 0.0
            drb = 0.0
            drn = 0.0
            dvb = 0.0
            dqb = 0.0
            dtq = 0.0
            for j in range(n_loc):
                b = B[q, j]
                d = D[q, j] * dj
                ro += b * rho_o[e, j]
                rn += b * rho_n[e, j]
                vo += b * v_o[e, j]
                vn += b * v_n[e, j]
                qn += b * q_n[e, j]
                tq += b * tau[e, j]
                drb += d * 0.5 * (rho_o[e, j] + rho_n[e, j])
                drn += d * rho_n[e, j]
                dvb += d * 0.5 * (v_o[e, j] + v_n[e, j])
                dqb += d * 0.5 * (q_o[e, j] + q_n[e, j])
                dtq += d * tau[e, j]
            rb = 0.5 * (ro + rn)
            vb = 0.5 * (vo + vn)

            i1 = (rn - ro) / k + (drb * vb + rb * dvb)
            # convective block, cancels pointwise in 1D; assembled literally
            conv = (drb * vb * vb + 2.0 * rb * vb * dvb) \
                - (drb * vb + rb * dvb) * vb - rb * vb * dvb
            i2 = rb * (vn - vo) / k + conv + rb * dtq
            i3 = tq - wq_q[e, q] + gamma * dqb - 0.25 * (vn * vn + vo * vo)
            i4 = qn - drn

            ww = 0.5 * h * w[q]
            for i in range(n_loc):
                bi = ww * B[q, i]
                R1[e, i] += bi * i1
                R2[e, i] += bi * i2
                R3[e, i] += bi * i3
                R4[e, i] += bi * i4

    last = n_loc - 1
    for f in range(n_el - 1):
        rbL = 0.5 * (rho_o[f, last] + rho_n[f, last])
        rbR = 0.5 * (rho_o[f + 1, 0] + rho_n[f + 1, 0])
        vbL = 0.5 * (v_o[f, last] + v_n[f, last])
        vbR = 0.5 * (v_o[f + 1, 0] + v_n[f + 1, 0])
        qbL = 0.5 * (q_o[f, last] + q_n[f, last])
        qbR = 0.5 * (q_o[f + 1, 0] + q_n[f + 1, 0])

        jrv = rbL * vbL - rbR * vbR
        jtau = tau[f, last] - tau[f + 1, 0]
        jvb = vbL - vbR
        jqb = qbL - qbR
        jrn = rho_n[f, last] - rho_n[f + 1, 0]

        R1[f, last] += -0.5 * jrv + alpha * jtau
        R1[f + 1, 0] += -0.5 * jrv - alpha * jtau
        R2[f, last] += -0.5 * jtau * rbL + beta * jvb
        R2[f + 1, 0] += -0.5 * jtau * rbR - beta * jvb
        R3[f, last] += -0.5 * gamma * jqb
        R3[f + 1, 0] += -0.5 * gamma * jqb
        R4[f, last] += 0.5 * jrn
        R4[f + 1, 0] += 0.5 * jrn

    return R1, R2, R3, R4


@njit(cache=True)
def jacobian_cells_faces(rho_o, v_o, q_o, rho_n, v_n, q_n, tau, wq_db_q,
                         B, D, w, h, k, gamma, alpha, beta):
    n_el, n_loc = rho_o.shape
    n_q = w.shape[0]
    dj = 2.0 / h

    vol = np.zeros((n_el, 11, n_loc, n_loc))
    cBB = np.empty(11)
    cBD = np.empty(11)

    for e in range(n_el):
        for q in range(n_q):
            vo = 0.0
            vn = 0.0
            rb = 0.0
            drb = 0.0
            dvb = 0.0
            dtq = 0.0
            for j in range(n_loc):
                b = B[q, j]
                d = D[q, j] * dj
                vo += b * v_o[e, j]
                vn += b * v_n[e, j]
                rb += b * 0.5 * (rho_o[e, j] + rho_n[e, j])
                drb += d * 0.5 * (rho_o[e, j] + rho_n[e, j])
                dvb += d * 0.5 * (v_o[e, j] + v_n[e, j])
                dtq += d * tau[e, j]
            vb = 0.5 * (vo + vn)

            # trial-side coefficients; convective derivatives cancel in 1D
            cBB[0] = 1.0 / k + 0.5 * dvb
            cBB[1] = 0.5 * drb
            cBB[2] = 0.5 * (vn - vo) / k + 0.5 * dtq
            cBB[3] = rb / k
            cBB[4] = 0.0
            cBB[5] = -wq_db_q[e, q]
            cBB[6] = -0.5 * vn
            cBB[7] = 1.0
            cBB[8] = 0.0
            cBB[9] = 0.0
            cBB[10] = 1.0
            cBD[0] = 0.5 * vb
            cBD[1] = 0.5 * rb
            cBD[2] = 0.0
            cBD[3] = 0.0
            cBD[4] = rb
            cBD[5] = 0.0
            cBD[6] = 0.0
            cBD[7] = 0.0
            cBD[8] = 0.5 * gamma
            cBD[9] = -1.0
            cBD[10] = 0.0

            ww = 0.5 * h * w[q]
            for p in range(11):
                bb = ww * cBB[p]
                bd = ww * cBD[p]
                if bb == 0.0 and bd == 0.0:
                    continue
                for i in range(n_loc):
                    bi = B[q, i]
                    for j in range(n_loc):
                        vol[e, p, i, j] += bi * (bb * B[q, j]
                                                 + bd * D[q, j] * dj)

    last = n_loc - 1
    nf = n_el - 1
    face = np.zeros((nf, 8, 2, 2))
    for f in range(nf):
        rbL = 0.5 * (rho_o[f, last] + rho_n[f, last])
        rbR = 0.5 * (rho_o[f + 1, 0] + rho_n[f + 1, 0])
        vbL = 0.5 * (v_o[f, last] + v_n[f, last])
        vbR = 0.5 * (v_o[f + 1, 0] + v_n[f + 1, 0])
        jtau = tau[f, last] - tau[f + 1, 0]

        for t in range(2):
            face[f, 0, t, 0] = -0.25 * vbL
            face[f, 0, t, 1] = 0.25 * vbR
            face[f, 1, t, 0] = -0.25 * rbL
            face[f, 1, t, 1] = 0.25 * rbR
            face[f, 6, t, 0] = -0.25 * gamma
            face[f, 6, t, 1] = 0.25 * gamma
            face[f, 7, t, 0] = 0.5
            face[f, 7, t, 1] = -0.5
        face[f, 2, 0, 0] = alpha
        face[f, 2, 0, 1] = -alpha
        face[f, 2, 1, 0] = -alpha
        face[f, 2, 1, 1] = alpha
        face[f, 3, 0, 0] = -0.25 * jtau
        face[f, 3, 1, 1] = -0.25 * jtau
        face[f, 4, 0, 0] = -0.5 * rbL
        face[f, 4, 0, 1] = 0.5 * rbL
        face[f, 4, 1, 0] = -0.5 * rbR
        face[f, 4, 1, 1] = 0.5 * rbR
        face[f, 5, 0, 0] = 0.5 * beta
        face[f, 5, 0, 1] = -0.5 * beta
        face[f, 5, 1, 0] = -0.5 * beta
        face[f, 5, 1, 1] = 0.5 * beta

    return vol, face
