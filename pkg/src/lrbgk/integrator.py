"""Stiffly accurate second-order IMEX-RK advance of the coupled system.

Each stage follows the fixed flow: explicit moment update, slope limiter,
QCM solve, then the implicit kinetic update.  The implicit collision term is
diagonal, so each stage solve reduces to dividing by 1 + gamma*dt/eps; that
scalar is folded into the combination coefficients *before* truncation so the
cut always acts on O(1) singular values.
"""

import time as _time
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .errors import SolverError, StepError
from .lowrank import combine
from .moments import compute_moment_field, moment_fluxes_field, moment_rhs
from .limiter import apply_limiter
from .qcm import maxwellian_field, qcm_solve_field
from .transport import SolutionState, transport_rhs

__all__ = [
    "IMEXTableau",
    "StepConfig",
    "DiagnosticsRecord",
    "RunResult",
    "cfl_dt",
    "imex_step",
    "run",
    "field_totals",
]

_GAMMA = 1.0 - np.sqrt(2.0) / 2.0
_DELTA = 1.0 - 1.0 / (2.0 * _GAMMA)


@dataclass(frozen=True)
class IMEXTableau:
    """Two-stage tableau; explicit and implicit parts share stage times."""

    gamma: float = _GAMMA
    delta: float = _DELTA

    def stage_times(self, t, dt):
        return (t, t + self.gamma * dt, t + dt)

    # both parts evaluate transport at the same stage times by construction
    explicit_stage_times = stage_times
    implicit_stage_times = stage_times


@dataclass
class StepConfig:
    eps: float
    dt: float
    tol: float
    limiter: str = "minmod"


@dataclass
class DiagnosticsRecord:
    time: float
    totals: np.ndarray        # Gauss totals of the kinetic moments
    aux_totals: np.ndarray    # Gauss totals of the auxiliary moment field
    max_rank: int
    ranks: np.ndarray
    wall: float


@dataclass
class RunResult:
    snapshots: List[Tuple[SolutionState, np.ndarray]]
    diagnostics: List[DiagnosticsRecord]
    steps: int
    wall: float


def cfl_dt(disc, vgrid, k=None):
    """CFL time step hx / ((2k+3) Vmax)."""
    if k is None:
        k = disc.k
    return disc.hx / ((2 * k + 3) * vgrid.Vmax)


def field_totals(U, disc):
    """Gauss-quadrature totals sum_i hx sum_p w_p U[i, p]."""
    return disc.hx * np.einsum("p,ipc->c", disc.w, U)


def _check_physical(U, stage):
    n = U[..., 0]
    T = (2.0 * U[..., 3] / n - (U[..., 1] / n) ** 2 - (U[..., 2] / n) ** 2) / 2.0
    bad = (n <= 0) | (T <= 0)
    if np.any(bad):
        i, p = np.argwhere(bad)[0]
        raise StepError(
            f"unphysical limited moments at stage {stage}, element {i}, node {p}: "
            f"n={n[i, p]:.3e}, T={T[i, p]:.3e}"
        )


def _corrected_maxwellians(U, vgrid, stage):
    try:
        params = qcm_solve_field(U.reshape(-1, 4), vgrid)
    except SolverError as exc:
        raise StepError(f"QCM solve failed at stage {stage}: {exc}") from exc
    return params, maxwellian_field(params, vgrid)


def imex_step(state, U, cfg, disc, vgrid, bc, tableau=IMEXTableau()):
    """One IMEX-RK2 step; returns (new state, new moment field, stage info)."""
    dt, eps, tol = cfg.dt, cfg.eps, cfg.tol
    g, d = tableau.gamma, tableau.delta
    kp1 = disc.k + 1
    a = 1.0 / (1.0 + g * dt / eps)

    C0 = state.C
    F0 = transport_rhs(state, bc, disc, vgrid, tol)
    P0 = moment_rhs(*moment_fluxes_field(state, vgrid), bc, disc)

    # stage 1: moments -> limiter -> QCM -> implicit kinetic solve
    U1, mask1 = apply_limiter(U + g * dt * P0, disc, bc, cfg.limiter)
    _check_physical(U1, 1)
    params1, M1 = _corrected_maxwellians(U1, vgrid, 1)
    C1 = [
        [
            combine(
                (
                    (a, C0[i][p]),
                    (a * g * dt, F0[i][p]),
                    (a * g * dt / eps, M1[i * kp1 + p]),
                ),
                tol,
            )
            for p in range(kp1)
        ]
        for i in range(disc.Nx)
    ]
    state1 = SolutionState(C1, state.time + g * dt)

    F1 = transport_rhs(state1, bc, disc, vgrid, tol)
    P1 = moment_rhs(*moment_fluxes_field(state1, vgrid), bc, disc)

    # stage 2 (stiffly accurate: stage value is the step update)
    U2, mask2 = apply_limiter(U + d * dt * P0 + (1.0 - d) * dt * P1, disc, bc, cfg.limiter)
    _check_physical(U2, 2)
    params2, M2 = _corrected_maxwellians(U2, vgrid, 2)
    relax = a * (1.0 - g) * dt / eps
    C2 = [
        [
            combine(
                (
                    (a, C0[i][p]),
                    (a * d * dt, F0[i][p]),
                    (a * (1.0 - d) * dt, F1[i][p]),
                    (relax, M1[i * kp1 + p]),
                    (-relax, C1[i][p]),
                    (a * g * dt / eps, M2[i * kp1 + p]),
                ),
                tol,
            )
            for p in range(kp1)
        ]
        for i in range(disc.Nx)
    ]
    info = {
        "params1": params1,
        "params2": params2,
        "maxwellians2": M2,
        "troubled1": mask1,
        "troubled2": mask2,
    }
    return SolutionState(C2, state.time + dt), U2, info


def run(
    state,
    U,
    cfg,
    disc,
    vgrid,
    bc,
    t_final,
    snapshot_every: int = 0,
    record_diagnostics: bool = True,
):
    """Advance to t_final with a final partial step to land exactly on it."""
    t0 = state.time
    start = _time.perf_counter()

    def record(st, Uf):
        ranks = st.ranks()
        return DiagnosticsRecord(
            time=st.time,
            totals=field_totals(compute_moment_field(st, vgrid), disc),
            aux_totals=field_totals(Uf, disc),
            max_rank=int(ranks.max()),
            ranks=ranks,
            wall=_time.perf_counter() - start,
        )

    diagnostics = [record(state, U)] if record_diagnostics else []
    snapshots = [(state, U.copy())]
    steps = 0
    while state.time < t_final - 1e-14 * max(1.0, abs(t_final)):
        dt = min(cfg.dt, t_final - state.time)
        step_cfg = cfg if dt == cfg.dt else StepConfig(cfg.eps, dt, cfg.tol, cfg.limiter)
        state, U, _ = imex_step(state, U, step_cfg, disc, vgrid, bc)
        steps += 1
        if record_diagnostics:
            diagnostics.append(record(state, U))
        if snapshot_every and steps % snapshot_every == 0:
            snapshots.append((state, U.copy()))
    if state.time != t0 and (not snapshot_every or steps % snapshot_every):
        snapshots.append((state, U.copy()))
    return RunResult(
        snapshots=snapshots,
        diagnostics=diagnostics,
        steps=steps,
        wall=_time.perf_counter() - start,
    )
