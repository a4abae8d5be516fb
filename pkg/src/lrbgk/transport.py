"""Explicit DG transport operators acting on low-rank velocity matrices.

The nodal update for node p of element i combines the neighbor-stencil
matrices with scalar basis coefficients, then weights rows by the upwind
velocity split max(vx, 0) / min(vx, 0).  Scalar coefficients are folded into
the cores; only the velocity weighting touches a factor.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import ConfigurationError
from .lowrank import LowRankMatrix, _truncate_factored, combine, scale_rows, scaled

__all__ = [
    "SolutionState",
    "BoundaryCondition",
    "flux_plus",
    "flux_minus",
    "transport_rhs",
    "stencil_tables",
]


@dataclass
class SolutionState:
    """Per-(element, node) low-rank matrices; entries are nodal values of f."""

    C: List[List[LowRankMatrix]]
    time: float = 0.0

    @property
    def Nx(self):
        return len(self.C)

    @property
    def nodes_per_element(self):
        return len(self.C[0])

    def max_rank(self):
        return max(A.rank for row in self.C for A in row)

    def ranks(self):
        return np.array([[A.rank for A in row] for row in self.C])


@dataclass
class BoundaryCondition:
    """Neighbor resolution at the domain ends.

    periodic      : wrap element indices modulo Nx
    fixed_ghost   : prescribed ghost node matrices (e.g. inflow Maxwellians)
    zero_gradient : ghost nodes copy the nearest interior node
    """

    kind: str
    left_ghost: Optional[List[LowRankMatrix]] = None
    right_ghost: Optional[List[LowRankMatrix]] = None
    left_ghost_moment_flux: Optional[np.ndarray] = field(default=None, repr=False)
    right_ghost_moment_flux: Optional[np.ndarray] = field(default=None, repr=False)
    left_ghost_avg: Optional[np.ndarray] = field(default=None, repr=False)
    right_ghost_avg: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("periodic", "fixed_ghost", "zero_gradient"):
            raise ConfigurationError(f"unknown boundary kind {self.kind!r}")
        if self.kind == "fixed_ghost" and (self.left_ghost is None or self.right_ghost is None):
            raise ConfigurationError("fixed_ghost requires ghost states at both ends")

    def prev_nodes(self, C, i):
        if i > 0:
            return C[i - 1]
        if self.kind == "periodic":
            return C[-1]
        if self.kind == "fixed_ghost":
            return self.left_ghost
        return [C[0][0]] * len(C[0])

    def next_nodes(self, C, i):
        if i < len(C) - 1:
            return C[i + 1]
        if self.kind == "periodic":
            return C[0]
        if self.kind == "fixed_ghost":
            return self.right_ghost
        return [C[-1][-1]] * len(C[0])


def stencil_tables(disc):
    """Scalar stencil coefficients of the upwind fluxes, indexed [p, q].

    Returns (self_plus, prev_plus, next_minus, self_minus) multiplying the
    stencil matrices inside the inner sum (before the -1/(hx w_p) prefactor).
    """
    Ll, Lr, D, w = disc.L_left, disc.L_right, disc.D, disc.w
    self_plus = Lr[None, :] * Lr[:, None] - w[None, :] * D
    prev_plus = -(Lr[None, :] * Ll[:, None])
    next_minus = Ll[None, :] * Lr[:, None]
    self_minus = -(Ll[None, :] * Ll[:, None]) - w[None, :] * D
    return self_plus, prev_plus, next_minus, self_minus


def flux_plus(p, C_prev, C_self, disc, vgrid, tol):
    """Upwind flux from the left: -(1/(hx w_p)) max(vx,0) * (stencil sum)."""
    self_plus, prev_plus, _, _ = stencil_tables(disc)
    terms = [(self_plus[p, q], C_self[q]) for q in range(disc.k + 1)]
    terms += [(prev_plus[p, q], C_prev[q]) for q in range(disc.k + 1)]
    inner = combine(terms, tol)
    return scaled(scale_rows(inner, vgrid.vx_plus), -1.0 / (disc.hx * disc.w[p]))


def flux_minus(p, C_self, C_next, disc, vgrid, tol):
    """Upwind flux from the right: -(1/(hx w_p)) min(vx,0) * (stencil sum)."""
    _, _, next_minus, self_minus = stencil_tables(disc)
    terms = [(self_minus[p, q], C_self[q]) for q in range(disc.k + 1)]
    terms += [(next_minus[p, q], C_next[q]) for q in range(disc.k + 1)]
    inner = combine(terms, tol)
    return scaled(scale_rows(inner, vgrid.vx_minus), -1.0 / (disc.hx * disc.w[p]))


def transport_rhs(state, bc, disc, vgrid, tol):
    """Both upwind fluxes for every node, truncated at ``tol``.

    Assembled in one fused QR-SVD pass per node (equivalent to summing
    flux_plus and flux_minus, with one truncation instead of several).
    """
    C = state.C
    kp1 = disc.k + 1
    self_plus, prev_plus, next_minus, self_minus = stencil_tables(disc)
    vxp = vgrid.vx_plus[:, None]
    vxm = vgrid.vx_minus[:, None]
    out = []
    for i in range(disc.Nx):
        prev = bc.prev_nodes(C, i)
        nxt = bc.next_nodes(C, i)
        row = []
        for p in range(kp1):
            pref = -1.0 / (disc.hx * disc.w[p])
            xs, ys = [], []
            for q in range(kp1):
                for coef, A, vsplit in (
                    (self_plus[p, q], C[i][q], vxp),
                    (prev_plus[p, q], prev[q], vxp),
                    (self_minus[p, q], C[i][q], vxm),
                    (next_minus[p, q], nxt[q], vxm),
                ):
                    c = pref * coef
                    if c != 0.0 and A.rank:
                        xs.append(vsplit * (A.left * (c * A.core)))
                        ys.append(A.right)
            if xs:
                row.append(_truncate_factored(np.hstack(xs), np.hstack(ys), tol))
            else:
                row.append(LowRankMatrix.zero(vgrid.Nv))
        out.append(row)
    return out
