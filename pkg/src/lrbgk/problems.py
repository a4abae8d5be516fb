"""Initial and boundary data for the three benchmark problems.

All initial kinetic states are QCM-corrected discrete Maxwellians of the
profile moments at each node, so t = 0 is exactly conservative at the
discrete level.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import ConfigurationError
from .moments import attach_ghost_fluxes
from .qcm import maxwellian_field, qcm_solve_field
from .transport import BoundaryCondition, SolutionState

__all__ = [
    "ProblemSpec",
    "smooth_ic",
    "standing_shock_ic",
    "sod_ic",
    "get_problem",
    "conserved_from_primitive",
    "build_initial_state",
]

# Mach ~5 standing shock Riemann states (upstream, downstream)
_SHOCK_UP = (0.62963, 1.63712, 0.0, 0.595588)
_SHOCK_DOWN = (1.0, 1.03078, 0.0, 1.0)


@dataclass
class ProblemSpec:
    name: str
    xa: float
    xb: float
    Vmax: float
    bc_kind: str
    eps: float
    # (x, hx) -> (n, ux, uy, T); hx enters only for resolution-dependent smoothing
    profiles: Callable[[np.ndarray, float], Tuple[np.ndarray, ...]]
    left_state: Optional[Tuple[float, float, float, float]] = None
    right_state: Optional[Tuple[float, float, float, float]] = None


def smooth_ic():
    """Sinusoidal density wave on [0, 2 pi] with u = 0, T = 1, periodic."""

    def profiles(x, hx):
        n = 1.0 + 0.5 * np.sin(x)
        z = np.zeros_like(x)
        return n, z, z, np.ones_like(x)

    return ProblemSpec("smooth", 0.0, 2.0 * np.pi, 12.0, "periodic", 1.0, profiles)


def standing_shock_ic():
    """Tanh-smoothed standing shock on [0, 2 pi] with fixed inflow/outflow ghosts."""

    def profiles(x, hx):
        xi = 1.0 / hx
        t = np.tanh(xi * (x - np.pi))
        out = []
        for phi0, phi1 in zip(_SHOCK_UP, _SHOCK_DOWN):
            a, b = (phi1 - phi0) / 2.0, (phi1 + phi0) / 2.0
            out.append(a * t + b)
        return tuple(out)

    return ProblemSpec(
        "standing_shock",
        0.0,
        2.0 * np.pi,
        12.0,
        "fixed_ghost",
        1e-13,
        profiles,
        left_state=_SHOCK_UP,
        right_state=_SHOCK_DOWN,
    )


def sod_ic():
    """Sod shock tube on [0, 1] x [-5, 5]^2; T = p/n so (1, 0.8) across the jump."""

    def profiles(x, hx):
        left = x <= 0.5
        n = np.where(left, 1.0, 0.125)
        T = np.where(left, 1.0, 0.8)
        z = np.zeros_like(x)
        return n, z, z, T

    return ProblemSpec(
        "sod",
        0.0,
        1.0,
        5.0,
        "zero_gradient",
        1e-13,
        profiles,
        left_state=(1.0, 0.0, 0.0, 1.0),
        right_state=(0.125, 0.0, 0.0, 0.8),
    )


_PROBLEMS = {"smooth": smooth_ic, "standing_shock": standing_shock_ic, "sod": sod_ic}


def get_problem(name):
    try:
        return _PROBLEMS[name]()
    except KeyError:
        raise ConfigurationError(
            f"unknown problem {name!r}; choose from {sorted(_PROBLEMS)}"
        ) from None


def conserved_from_primitive(n, ux, uy, T):
    """(n, n ux, n uy, E) with E = (n |u|^2 + 2 n T) / 2 (two velocity dimensions)."""
    return np.stack(
        [n, n * ux, n * uy, 0.5 * (n * (ux**2 + uy**2) + 2.0 * n * T)], axis=-1
    )


def build_initial_state(spec, disc, vgrid):
    """QCM-corrected Maxwellian state and moment field at t = 0, plus the BC."""
    n, ux, uy, T = spec.profiles(disc.node_x, disc.hx)
    U0 = conserved_from_primitive(n, ux, uy, T)
    params = qcm_solve_field(U0.reshape(-1, 4), vgrid)
    mats = maxwellian_field(params, vgrid)
    kp1 = disc.k + 1
    C = [[mats[i * kp1 + p] for p in range(kp1)] for i in range(disc.Nx)]
    state = SolutionState(C, 0.0)

    if spec.bc_kind == "fixed_ghost":
        ghosts = []
        for riemann in (spec.left_state, spec.right_state):
            target = conserved_from_primitive(*(np.full(kp1, v) for v in riemann))
            gparams = qcm_solve_field(target, vgrid)
            ghosts.append(maxwellian_field(gparams, vgrid))
        bc = BoundaryCondition("fixed_ghost", left_ghost=ghosts[0], right_ghost=ghosts[1])
        attach_ghost_fluxes(bc, vgrid, disc)
    else:
        bc = BoundaryCondition(spec.bc_kind)
    return state, U0, bc
