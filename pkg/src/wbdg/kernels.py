"""Compiled residual kernels (numba).

These fuse trace evaluation, Riemann fluxes, volume and source quadrature
into single passes over the mesh. They compute the same quantities as the
array code in :mod:`wbdg.dg`, which is kept as the reference backend.

Equilibrium samples for the well-balanced form are produced by the point
routines below, the same ones the residual calls, so a zero perturbation
cancels bit for bit.

``status`` arrays report the first inadmissible state found:
``[kind, i, j, k, side]`` with kind 1 = volume point, 2 = x face,
3 = y face.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# --- point routines ---------------------------------------------------------


@njit(cache=True, inline="always")
def _flux1(r, m, E, gamma):
    p = (gamma - 1.0) * (E - 0.5 * (m * m) / r)
    v = m / r
    return r * v, m * v + p, E * v + p * v, p, abs(v) + np.sqrt(gamma * p / r)


@njit(cache=True, inline="always")
def _pressure2(r, mx, my, E, gamma):
    return (gamma - 1.0) * (E - 0.5 * (mx * mx + my * my) / r)


@njit(cache=True, inline="always")
def _flux2(r, mx, my, E, p, vn, axis):
    f0 = r * vn
    f1 = mx * vn
    f2 = my * vn
    if axis == 0:
        f1 += p
    else:
        f2 += p
    return f0, f1, f2, E * vn + p * vn


@njit(cache=True)
def point_terms_1d(W, grad, gamma, F, S):
    """Flux and source rows at every point of ``W`` (3, ...) flattened."""
    n = W.shape[1]
    for k in range(n):
        r, m, E = W[0, k], W[1, k], W[2, k]
        f0, f1, f2, p, s = _flux1(r, m, E, gamma)
        F[0, k] = f0
        F[1, k] = f1
        F[2, k] = f2
        g = grad[k]
        S[0, k] = -r * g
        S[1, k] = -(m * g)


@njit(cache=True)
def face_flux_1d(W, gamma, F):
    n = W.shape[1]
    for k in range(n):
        f0, f1, f2, p, s = _flux1(W[0, k], W[1, k], W[2, k], gamma)
        F[0, k] = f0
        F[1, k] = f1
        F[2, k] = f2


@njit(cache=True)
def point_terms_2d(W, gx, gy, gamma, FX, FY, S):
    n = W.shape[1]
    for k in range(n):
        r, mx, my, E = W[0, k], W[1, k], W[2, k], W[3, k]
        p = _pressure2(r, mx, my, E, gamma)
        vx = mx / r
        vy = my / r
        a0, a1, a2, a3 = _flux2(r, mx, my, E, p, vx, 0)
        FX[0, k] = a0
        FX[1, k] = a1
        FX[2, k] = a2
        FX[3, k] = a3
        b0, b1, b2, b3 = _flux2(r, mx, my, E, p, vy, 1)
        FY[0, k] = b0
        FY[1, k] = b1
        FY[2, k] = b2
        FY[3, k] = b3
        S[0, k] = -r * gx[k]
        S[1, k] = -r * gy[k]
        S[2, k] = -(mx * gx[k] + my * gy[k])


@njit(cache=True)
def face_flux_2d(W, gamma, axis, F):
    n = W.shape[1]
    for k in range(n):
        r, mx, my, E = W[0, k], W[1, k], W[2, k], W[3, k]
        p = _pressure2(r, mx, my, E, gamma)
        vn = (mx if axis == 0 else my) / r
        a0, a1, a2, a3 = _flux2(r, mx, my, E, p, vn, axis)
        F[0, k] = a0
        F[1, k] = a1
        F[2, k] = a2
        F[3, k] = a3


# --- 1D residual ------------------------------------------------------------


@njit(cache=True)
def residual_1d(U, B, Dp, Pj, psi_m, psi_p, dx, gamma, grad, has_grad,
                bc_lo, bc_hi, periodic, has_eq, eq_vol, eq_face, eq_fvol, eq_src, eq_fface,
                R, status):
    e, N, P = U.shape
    Q = B.shape[0]
    h = np.empty((3, N + 1))
    ul = np.empty(3)
    ur = np.empty(3)
    for j in range(N + 1):
        # low side of face j
        if j > 0 or periodic:
            c = j - 1 if j > 0 else N - 1
            fj = j if j > 0 else N
            for v in range(3):
                s = 0.0
                for i in range(P):
                    s += U[v, c, i] * psi_p[i]
                if has_eq:
                    s += eq_face[v, fj]
                ul[v] = s
        else:
            for v in range(3):
                ul[v] = bc_lo[v]
        # high side
        if j < N or periodic:
            c = j if j < N else 0
            fj = j if j < N else 0
            for v in range(3):
                s = 0.0
                for i in range(P):
                    s += U[v, c, i] * psi_m[i]
                if has_eq:
                    s += eq_face[v, fj]
                ur[v] = s
        else:
            for v in range(3):
                ur[v] = bc_hi[v]
        fm0, fm1, fm2, pm, sm = _flux1(ul[0], ul[1], ul[2], gamma)
        fp0, fp1, fp2, pp, sp = _flux1(ur[0], ur[1], ur[2], gamma)
        if not (ul[0] > 0.0 and pm > 0.0):
            status[0] = 2
            status[1] = j
            status[4] = 0
            return
        if not (ur[0] > 0.0 and pp > 0.0):
            status[0] = 2
            status[1] = j
            status[4] = 1
            return
        a = max(sm, sp)
        h[0, j] = 0.5 * (fm0 + fp0) - 0.5 * a * (ur[0] - ul[0])
        h[1, j] = 0.5 * (fm1 + fp1) - 0.5 * a * (ur[1] - ul[1])
        h[2, j] = 0.5 * (fm2 + fp2) - 0.5 * a * (ur[2] - ul[2])
        if has_eq:
            for v in range(3):
                h[v, j] -= eq_fface[v, j]

    scale = 2.0 / dx
    av = np.empty((3, P))
    asrc = np.empty((2, P))
    for k in range(N):
        for i in range(P):
            for v in range(3):
                av[v, i] = 0.0
            asrc[0, i] = 0.0
            asrc[1, i] = 0.0
        for q in range(Q):
            r = 0.0
            m = 0.0
            E = 0.0
            for i in range(P):
                b = B[q, i]
                r += U[0, k, i] * b
                m += U[1, k, i] * b
                E += U[2, k, i] * b
            if has_eq:
                r += eq_vol[0, k, q]
                m += eq_vol[1, k, q]
                E += eq_vol[2, k, q]
            f0, f1, f2, p, s = _flux1(r, m, E, gamma)
            if not (r > 0.0 and p > 0.0):
                status[0] = 1
                status[1] = k
                status[2] = q
                return
            if has_eq:
                f0 -= eq_fvol[0, k, q]
                f1 -= eq_fvol[1, k, q]
                f2 -= eq_fvol[2, k, q]
            for i in range(P):
                d = Dp[q, i]
                av[0, i] += f0 * d
                av[1, i] += f1 * d
                av[2, i] += f2 * d
            if has_grad:
                g = grad[k, q]
                s1 = -r * g
                s2 = -(m * g)
                if has_eq:
                    s1 -= eq_src[0, k, q]
                    s2 -= eq_src[1, k, q]
                for i in range(P):
                    w = Pj[q, i]
                    asrc[0, i] += s1 * w
                    asrc[1, i] += s2 * w
        for v in range(3):
            hr = h[v, k + 1]
            hl = h[v, k]
            for i in range(P):
                val = (av[v, i] - (hr * psi_p[i] - hl * psi_m[i])) * scale
                if v > 0:
                    val += asrc[v - 1, i]
                R[v, k, i] = val


# --- 2D face flux ----------------------------------------------------------


@njit(cache=True, inline="always")
def _llf2(ul, ur, axis, gamma, out):
    """LLF flux into ``out``; returns 0, or 1/2 for a bad low/high state."""
    pl = _pressure2(ul[0], ul[1], ul[2], ul[3], gamma)
    pr = _pressure2(ur[0], ur[1], ur[2], ur[3], gamma)
    if not (ul[0] > 0.0 and pl > 0.0):
        return 1
    if not (ur[0] > 0.0 and pr > 0.0):
        return 2
    vl = ul[1 + axis] / ul[0]
    vr = ur[1 + axis] / ur[0]
    sl = abs(vl) + np.sqrt(gamma * pl / ul[0])
    sr = abs(vr) + np.sqrt(gamma * pr / ur[0])
    a = max(sl, sr)
    l0, l1, l2, l3 = _flux2(ul[0], ul[1], ul[2], ul[3], pl, vl, axis)
    r0, r1, r2, r3 = _flux2(ur[0], ur[1], ur[2], ur[3], pr, vr, axis)
    out[0] = 0.5 * (l0 + r0) - 0.5 * a * (ur[0] - ul[0])
    out[1] = 0.5 * (l1 + r1) - 0.5 * a * (ur[1] - ul[1])
    out[2] = 0.5 * (l2 + r2) - 0.5 * a * (ur[2] - ul[2])
    out[3] = 0.5 * (l3 + r3) - 0.5 * a * (ur[3] - ul[3])
    return 0


# --- 2D pointwise stage of the GEMM formulation -----------------------------


@njit(cache=True)
def pointwise_2d(VT, Q, gamma, gx, gy, has_grad, bcx_lo, bcx_hi, bcy_lo, bcy_hi, periodic,
                 has_eq, eq_vol, eq_fx, eq_fy, eq_fvx, eq_fvy, eq_src, eq_ffx, eq_ffy, G, status):
    """Fluxes, sources and Riemann fluxes from point values.

    ``VT[v, i, j, :]`` holds the ``Q*Q`` volume values followed by the four
    face traces (left, right, bottom, top; ``Q`` each). ``G[v, i, j, :]``
    receives x fluxes, y fluxes and sources at the volume points, then the
    numerical fluxes on the four faces, ready for one matrix product with
    the assembly operator.
    """
    e, Nx, Ny, _ = VT.shape
    QQ = Q * Q
    o_src = 2 * QQ
    o_face = 3 * QQ
    ul = np.empty(4)
    ur = np.empty(4)
    hv = np.empty(4)
    for i in range(Nx):
        for j in range(Ny):
            for k in range(QQ):
                rho = VT[0, i, j, k]
                mx = VT[1, i, j, k]
                my = VT[2, i, j, k]
                E = VT[3, i, j, k]
                if has_eq:
                    rho += eq_vol[0, i, j, k]
                    mx += eq_vol[1, i, j, k]
                    my += eq_vol[2, i, j, k]
                    E += eq_vol[3, i, j, k]
                p = _pressure2(rho, mx, my, E, gamma)
                if not (rho > 0.0 and p > 0.0):
                    status[0] = 1
                    status[1] = i
                    status[2] = j
                    status[3] = k
                    return
                vx = mx / rho
                vy = my / rho
                a0, a1, a2, a3 = _flux2(rho, mx, my, E, p, vx, 0)
                b0, b1, b2, b3 = _flux2(rho, mx, my, E, p, vy, 1)
                if has_eq:
                    a0 -= eq_fvx[0, i, j, k]
                    a1 -= eq_fvx[1, i, j, k]
                    a2 -= eq_fvx[2, i, j, k]
                    a3 -= eq_fvx[3, i, j, k]
                    b0 -= eq_fvy[0, i, j, k]
                    b1 -= eq_fvy[1, i, j, k]
                    b2 -= eq_fvy[2, i, j, k]
                    b3 -= eq_fvy[3, i, j, k]
                G[0, i, j, k] = a0
                G[1, i, j, k] = a1
                G[2, i, j, k] = a2
                G[3, i, j, k] = a3
                G[0, i, j, QQ + k] = b0
                G[1, i, j, QQ + k] = b1
                G[2, i, j, QQ + k] = b2
                G[3, i, j, QQ + k] = b3
                G[0, i, j, o_src + k] = 0.0
                if has_grad:
                    g1 = gx[i, j, k]
                    g2 = gy[i, j, k]
                    s0 = -rho * g1
                    s1 = -rho * g2
                    s2 = -(mx * g1 + my * g2)
                    if has_eq:
                        s0 -= eq_src[0, i, j, k]
                        s1 -= eq_src[1, i, j, k]
                        s2 -= eq_src[2, i, j, k]
                    G[1, i, j, o_src + k] = s0
                    G[2, i, j, o_src + k] = s1
                    G[3, i, j, o_src + k] = s2
                else:
                    G[1, i, j, o_src + k] = 0.0
                    G[2, i, j, o_src + k] = 0.0
                    G[3, i, j, o_src + k] = 0.0

    # x faces: face f sits between cells f-1 and f
    for f in range(Nx + 1):
        for j in range(Ny):
            for r in range(Q):
                if f > 0 or periodic:
                    c = f - 1 if f > 0 else Nx - 1
                    fe = f if f > 0 else Nx
                    for v in range(4):
                        ul[v] = VT[v, c, j, QQ + Q + r] + (eq_fx[v, fe, j, r] if has_eq else 0.0)
                else:
                    for v in range(4):
                        ul[v] = bcx_lo[v, j, r]
                if f < Nx or periodic:
                    c = f if f < Nx else 0
                    fe = f if f < Nx else 0
                    for v in range(4):
                        ur[v] = VT[v, c, j, QQ + r] + (eq_fx[v, fe, j, r] if has_eq else 0.0)
                else:
                    for v in range(4):
                        ur[v] = bcx_hi[v, j, r]
                bad = _llf2(ul, ur, 0, gamma, hv)
                if bad:
                    status[0] = 2
                    status[1] = f
                    status[2] = j
                    status[3] = r
                    status[4] = bad - 1
                    return
                if has_eq:
                    for v in range(4):
                        hv[v] -= eq_ffx[v, f, j, r]
                if f > 0:
                    for v in range(4):
                        G[v, f - 1, j, o_face + Q + r] = hv[v]
                if f < Nx:
                    for v in range(4):
                        G[v, f, j, o_face + r] = hv[v]
    for i in range(Nx):
        for f in range(Ny + 1):
            for q in range(Q):
                if f > 0 or periodic:
                    c = f - 1 if f > 0 else Ny - 1
                    fe = f if f > 0 else Ny
                    for v in range(4):
                        ul[v] = VT[v, i, c, QQ + 3 * Q + q] + (eq_fy[v, i, fe, q] if has_eq else 0.0)
                else:
                    for v in range(4):
                        ul[v] = bcy_lo[v, i, q]
                if f < Ny or periodic:
                    c = f if f < Ny else 0
                    fe = f if f < Ny else 0
                    for v in range(4):
                        ur[v] = VT[v, i, c, QQ + 2 * Q + q] + (eq_fy[v, i, fe, q] if has_eq else 0.0)
                else:
                    for v in range(4):
                        ur[v] = bcy_hi[v, i, q]
                bad = _llf2(ul, ur, 1, gamma, hv)
                if bad:
                    status[0] = 3
                    status[1] = i
                    status[2] = f
                    status[3] = q
                    status[4] = bad - 1
                    return
                if has_eq:
                    for v in range(4):
                        hv[v] -= eq_ffy[v, i, f, q]
                if f > 0:
                    for v in range(4):
                        G[v, i, f - 1, o_face + 3 * Q + q] = hv[v]
                if f < Ny:
                    for v in range(4):
                        G[v, i, f, o_face + 2 * Q + q] = hv[v]
