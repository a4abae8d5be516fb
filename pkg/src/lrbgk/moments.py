"""Discrete macroscopic moments of the low-rank solution and their transport.

All integrals are midpoint Riemann sums over the velocity grid, evaluated by
contracting weight vectors against the low-rank factors (never densifying).
The moment system shares the DG stencil coefficients with the kinetic
transport operators, which is what makes the two discretely consistent.
"""

from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError
from .transport import stencil_tables

__all__ = [
    "MomentVector",
    "compute_moments",
    "compute_moment_field",
    "moment_flux_pm",
    "moment_fluxes_field",
    "moment_rhs",
    "attach_ghost_fluxes",
    "primitive_from_conserved",
]


class MomentVector(NamedTuple):
    """Conserved moments (n, n u_x, n u_y, E) at one spatial node."""

    n: float
    nux: float
    nuy: float
    E: float

    def temperature(self):
        ux, uy = self.nux / self.n, self.nuy / self.n
        return (2.0 * self.E / self.n - ux**2 - uy**2) / 2.0


def compute_moments(C, vgrid):
    """Number density, momentum, and energy of one nodal matrix."""
    if C.rank == 0:
        return MomentVector(0.0, 0.0, 0.0, 0.0)
    ax = vgrid.mom_x[:3] @ C.left          # hv * {1, vx, vx^2} against Theta
    ay = vgrid.mom_y[:3] @ C.right         # hv * {1, vy, vy^2} against Psi
    a0s = ax[0] * C.core
    n = float(a0s @ ay[0])
    nux = float((ax[1] * C.core) @ ay[0])
    nuy = float(a0s @ ay[1])
    E = 0.5 * float((ax[2] * C.core) @ ay[0] + a0s @ ay[2])
    return MomentVector(n, nux, nuy, E)


def compute_moment_field(state, vgrid):
    """Array of conserved moments over all (element, node) pairs, shape (Nx, k+1, 4)."""
    out = np.empty((state.Nx, state.nodes_per_element, 4))
    for i, row in enumerate(state.C):
        for p, A in enumerate(row):
            out[i, p] = compute_moments(A, vgrid)
    return out


def moment_flux_pm(C, vgrid, sign):
    """Half-range kinetic fluxes of the conserved moments.

    Weightings are {vx^s, (vx^s)^2, vx^s vy, ((vx^s)^3 + vx^s vy^2)/2} with
    vx^+ = max(vx, 0) and vx^- = min(vx, 0).
    """
    if sign not in ("+", "-"):
        raise ConfigurationError(f"sign must be '+' or '-', got {sign!r}")
    if C.rank == 0:
        return np.zeros(4)
    fx = (vgrid.flux_x_plus if sign == "+" else vgrid.flux_x_minus) @ C.left
    ay = vgrid.mom_y[:3] @ C.right
    f0s = fx[0] * C.core
    return np.array(
        [
            f0s @ ay[0],
            (fx[1] * C.core) @ ay[0],
            f0s @ ay[1],
            0.5 * ((fx[2] * C.core) @ ay[0] + f0s @ ay[2]),
        ]
    )


def moment_fluxes_field(state, vgrid):
    """Both half-range flux fields, each of shape (Nx, k+1, 4)."""
    kp1 = state.nodes_per_element
    Fp = np.empty((state.Nx, kp1, 4))
    Fm = np.empty((state.Nx, kp1, 4))
    for i, row in enumerate(state.C):
        for p, A in enumerate(row):
            if A.rank == 0:
                Fp[i, p] = 0.0
                Fm[i, p] = 0.0
                continue
            fxp = vgrid.flux_x_plus @ A.left
            fxm = vgrid.flux_x_minus @ A.left
            ay = vgrid.mom_y[:3] @ A.right
            s = A.core
            for F, fx in ((Fp, fxp), (Fm, fxm)):
                f0s = fx[0] * s
                F[i, p, 0] = f0s @ ay[0]
                F[i, p, 1] = (fx[1] * s) @ ay[0]
                F[i, p, 2] = f0s @ ay[1]
                F[i, p, 3] = 0.5 * ((fx[2] * s) @ ay[0] + f0s @ ay[2])
    return Fp, Fm


def attach_ghost_fluxes(bc, vgrid, disc=None):
    """Precompute moment fluxes and cell averages of fixed ghost states."""
    if bc.kind == "fixed_ghost":
        bc.left_ghost_moment_flux = np.array(
            [moment_flux_pm(A, vgrid, "+") for A in bc.left_ghost]
        )
        bc.right_ghost_moment_flux = np.array(
            [moment_flux_pm(A, vgrid, "-") for A in bc.right_ghost]
        )
        if disc is not None:
            left = np.array([compute_moments(A, vgrid) for A in bc.left_ghost])
            right = np.array([compute_moments(A, vgrid) for A in bc.right_ghost])
            bc.left_ghost_avg = disc.w @ left
            bc.right_ghost_avg = disc.w @ right
    return bc


def _neighbor_fields(Fp, Fm, bc):
    Fp_prev = np.roll(Fp, 1, axis=0)
    Fm_next = np.roll(Fm, -1, axis=0)
    if bc.kind == "periodic":
        return Fp_prev, Fm_next
    if bc.kind == "fixed_ghost":
        if bc.left_ghost_moment_flux is None or bc.right_ghost_moment_flux is None:
            raise ConfigurationError("fixed_ghost moment fluxes not attached")
        Fp_prev[0] = bc.left_ghost_moment_flux
        Fm_next[-1] = bc.right_ghost_moment_flux
        return Fp_prev, Fm_next
    # zero_gradient: ghost nodes copy the nearest interior node
    Fp_prev[0] = Fp[0, 0]
    Fm_next[-1] = Fm[-1, -1]
    return Fp_prev, Fm_next


def moment_rhs(Fp, Fm, bc, disc):
    """Explicit transport RHS of the moment system, shape (Nx, k+1, 4)."""
    self_plus, prev_plus, next_minus, self_minus = stencil_tables(disc)
    Fp_prev, Fm_next = _neighbor_fields(Fp, Fm, bc)
    inner = (
        np.einsum("pq,iqc->ipc", self_plus, Fp)
        + np.einsum("pq,iqc->ipc", prev_plus, Fp_prev)
        + np.einsum("pq,iqc->ipc", self_minus, Fm)
        + np.einsum("pq,iqc->ipc", next_minus, Fm_next)
    )
    return inner * (-1.0 / (disc.hx * disc.w))[None, :, None]


def primitive_from_conserved(U):
    """(n, u_x, u_y, T) from conserved moments; U has trailing axis (n, nux, nuy, E)."""
    n = U[..., 0]
    ux = U[..., 1] / n
    uy = U[..., 2] / n
    T = (2.0 * U[..., 3] / n - ux**2 - uy**2) / 2.0
    return n, ux, uy, T
