"""Slow dense reference implementations used only by the tests.

Everything here works on full (Nv, Nv) velocity matrices with plain Riemann
sums and the DG weak form written out directly, independently of the factored
code paths in the package.  Periodic boundaries only.
"""

import numpy as np
from scipy.optimize import root

from lrbgk.discretization import lagrange_values


def dense_maxwellian(n, ux, uy, T, vgrid):
    """Full (Nv, Nv) Maxwellian matrix n/(2 pi T) exp(-((vx-ux)^2+(vy-uy)^2)/(2T))."""
    gx = np.exp(-((vgrid.vx - ux) ** 2) / (2.0 * T))
    gy = np.exp(-((vgrid.vy - uy) ** 2) / (2.0 * T))
    return (n / (2.0 * np.pi * T)) * np.outer(gx, gy)


def dense_moments(F, vgrid):
    """Conserved moments (n, n ux, n uy, E) of one dense matrix by Riemann sums."""
    hv2 = vgrid.hv**2
    VX = vgrid.vx[:, None]
    VY = vgrid.vy[None, :]
    n = hv2 * F.sum()
    nux = hv2 * (VX * F).sum()
    nuy = hv2 * (VY * F).sum()
    E = 0.5 * hv2 * ((VX**2 + VY**2) * F).sum()
    return np.array([n, nux, nuy, E])


def dense_moment_fluxes(F, vgrid):
    """Half-range moment fluxes (F^+, F^-) of one dense matrix."""
    hv2 = vgrid.hv**2
    VY = vgrid.vy[None, :]
    out = []
    for vxs in (np.maximum(vgrid.vx, 0.0)[:, None], np.minimum(vgrid.vx, 0.0)[:, None]):
        out.append(
            np.array(
                [
                    hv2 * (vxs * F).sum(),
                    hv2 * (vxs**2 * F).sum(),
                    hv2 * (vxs * VY * F).sum(),
                    0.5 * hv2 * ((vxs**3 + vxs * VY**2) * F).sum(),
                ]
            )
        )
    return out[0], out[1]


def dense_qcm_solve(target, vgrid):
    """Corrected Maxwellian parameters via a black-box root find on the dense moments."""
    target = np.asarray(target, dtype=float)
    n, nux, nuy, E = target
    guess = np.array([n, nux / n, nuy / n, (2 * E / n - (nux / n) ** 2 - (nuy / n) ** 2) / 2])

    def residual(p):
        return target - dense_moments(dense_maxwellian(*p, vgrid), vgrid)

    sol = root(residual, guess, method="hybr", tol=1e-12)
    res = np.linalg.norm(residual(sol.x))
    assert res <= 1e-12 * max(np.linalg.norm(target), 1.0), (sol.message, res)
    return sol.x


def dense_transport_rhs(F, disc, vgrid):
    """DG weak form with upwind interface fluxes on dense data, periodic.

    F has shape (Nx, k+1, Nv, Nv); the returned array has the same shape.
    """
    Nx, kp1 = F.shape[:2]
    Ll = lagrange_values(disc.xi, -0.5)
    Lr = lagrange_values(disc.xi, 0.5)
    vxp = np.maximum(vgrid.vx, 0.0)[:, None]
    vxm = np.minimum(vgrid.vx, 0.0)[:, None]
    vx = vgrid.vx[:, None]

    # traces of each element at its own left/right faces
    trace_r = np.einsum("q,iq...->i...", Lr, F)
    trace_l = np.einsum("q,iq...->i...", Ll, F)
    # upwind numerical flux at the interface x_{i+1/2}
    fhat = vxp * trace_r + vxm * np.roll(trace_l, -1, axis=0)

    out = np.empty_like(F)
    for i in range(Nx):
        for p in range(kp1):
            vol = sum(disc.w[q] * disc.D[p, q] * vx * F[i, q] for q in range(kp1))
            surf = Lr[p] * fhat[i] - Ll[p] * fhat[i - 1]
            out[i, p] = -(surf - vol) / (disc.hx * disc.w[p])
    return out


def dense_moment_rhs(F, disc, vgrid):
    """Weak-form transport of the conserved moments of dense data, periodic."""
    Nx, kp1 = F.shape[:2]
    Fp = np.empty((Nx, kp1, 4))
    Fm = np.empty((Nx, kp1, 4))
    for i in range(Nx):
        for p in range(kp1):
            Fp[i, p], Fm[i, p] = dense_moment_fluxes(F[i, p], vgrid)
    Ll = lagrange_values(disc.xi, -0.5)
    Lr = lagrange_values(disc.xi, 0.5)
    trace_rp = np.einsum("q,iqc->ic", Lr, Fp)
    trace_lm = np.einsum("q,iqc->ic", Ll, Fm)
    fhat = trace_rp + np.roll(trace_lm, -1, axis=0)
    out = np.empty((Nx, kp1, 4))
    for i in range(Nx):
        for p in range(kp1):
            vol = sum(disc.w[q] * disc.D[p, q] * (Fp[i, q] + Fm[i, q]) for q in range(kp1))
            surf = Lr[p] * fhat[i] - Ll[p] * fhat[i - 1]
            out[i, p] = -(surf - vol) / (disc.hx * disc.w[p])
    return out


def dense_imex_step(F, dt, eps, disc, vgrid):
    """Full-rank IMEX-RK2 step (no limiter), mirroring the two-stage scheme."""
    g = 1.0 - np.sqrt(2.0) / 2.0
    d = 1.0 - 1.0 / (2.0 * g)
    Nx, kp1 = F.shape[:2]

    def maxwellians(U):
        M = np.empty_like(F)
        for i in range(Nx):
            for p in range(kp1):
                M[i, p] = dense_maxwellian(*dense_qcm_solve(U[i, p], vgrid), vgrid)
        return M

    U0 = np.array([[dense_moments(F[i, p], vgrid) for p in range(kp1)] for i in range(Nx)])
    T0 = dense_transport_rhs(F, disc, vgrid)
    P0 = dense_moment_rhs(F, disc, vgrid)

    U1 = U0 + g * dt * P0
    M1 = maxwellians(U1)
    F1 = (F + g * dt * T0 + (g * dt / eps) * M1) / (1.0 + g * dt / eps)

    T1 = dense_transport_rhs(F1, disc, vgrid)
    P1 = dense_moment_rhs(F1, disc, vgrid)

    U2 = U0 + d * dt * P0 + (1.0 - d) * dt * P1
    M2 = maxwellians(U2)
    F2 = (
        F + d * dt * T0 + (1.0 - d) * dt * T1
        + ((1.0 - g) * dt / eps) * (M1 - F1)
        + (g * dt / eps) * M2
    ) / (1.0 + g * dt / eps)
    return F2, U2


def densify_state(state):
    """(Nx, k+1, Nv, Nv) array of the low-rank state's nodal matrices."""
    return np.array([[A.densify() for A in row] for row in state.C])
