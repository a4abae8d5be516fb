"""Spatial DG tables and the uniform velocity grid.

The reference element is I = [-1/2, 1/2] with k+1 Gauss-Legendre nodes; the
nodal basis is the Lagrange family on those nodes, so the mass matrix is
diagonal with entries hx * w_p.  Velocity nodes are cell-centered (midpoint
rule), which keeps the grid symmetric about v = 0 and is spectrally accurate
for Gaussian integrands.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "DGDiscretization",
    "VelocityGrid",
    "build_dg",
    "build_velocity_grid",
    "lagrange_values",
]


def lagrange_values(nodes, x):
    """Values of the Lagrange basis on ``nodes`` at a scalar point ``x``."""
    n = len(nodes)
    out = np.empty(n)
    for q in range(n):
        num = 1.0
        for s in range(n):
            if s != q:
                num *= (x - nodes[s]) / (nodes[q] - nodes[s])
        out[q] = num
    return out


def _diff_table(nodes):
    # D[p, q] = dL_p/dxi evaluated at node xi_q, via barycentric weights.
    n = len(nodes)
    bary = np.array(
        [1.0 / np.prod([nodes[i] - nodes[j] for j in range(n) if j != i]) for i in range(n)]
    ) if n > 1 else np.ones(1)
    D = np.zeros((n, n))
    for q in range(n):
        for p in range(n):
            if p != q:
                D[p, q] = (bary[p] / bary[q]) / (nodes[q] - nodes[p])
        D[q, q] = -np.sum(D[:, q]) + D[q, q]  # row-sum of basis derivatives is zero
    return D


@dataclass(frozen=True)
class DGDiscretization:
    """Uniform mesh on [a, b] with nodal Gauss-Legendre tables on the reference element."""

    a: float
    b: float
    Nx: int
    k: int
    hx: float
    xi: np.ndarray       # quadrature nodes on [-1/2, 1/2]
    w: np.ndarray        # quadrature weights, sum to 1
    L_left: np.ndarray   # L_q(-1/2)
    L_right: np.ndarray  # L_q(+1/2)
    D: np.ndarray        # D[p, q] = dL_p/dxi (xi_q)
    node_x: np.ndarray   # physical node coordinates, shape (Nx, k+1)

    @property
    def nodes_per_element(self):
        return self.k + 1

    def element_of(self, x):
        """Index of the element containing physical coordinate x."""
        i = int((x - self.a) / self.hx)
        return min(max(i, 0), self.Nx - 1)

    def basis_at(self, x, i):
        """Lagrange basis values of element i at physical coordinate x."""
        xc = self.a + (i + 0.5) * self.hx
        return lagrange_values(self.xi, (x - xc) / self.hx)


def build_dg(a, b, Nx, k):
    """Assemble mesh, quadrature, and Lagrange tables for polynomial degree k."""
    if Nx < 1:
        raise ConfigurationError(f"Nx must be >= 1, got {Nx}")
    if k < 0:
        raise ConfigurationError(f"polynomial degree must be >= 0, got {k}")
    # leggauss is exact to degree 2k+1; the test suite verifies this directly.
    x01, w01 = np.polynomial.legendre.leggauss(k + 1)
    xi = 0.5 * x01
    w = 0.5 * w01
    hx = (b - a) / Nx
    centers = a + (np.arange(Nx) + 0.5) * hx
    node_x = centers[:, None] + hx * xi[None, :]
    return DGDiscretization(
        a=a,
        b=b,
        Nx=Nx,
        k=k,
        hx=hx,
        xi=xi,
        w=w,
        L_left=lagrange_values(xi, -0.5),
        L_right=lagrange_values(xi, 0.5),
        D=_diff_table(xi),
        node_x=node_x,
    )


@dataclass(frozen=True)
class VelocityGrid:
    """Uniform cell-centered tensor grid on [-Vmax, Vmax]^2 with N_v points per axis."""

    Vmax: float
    Nv: int
    hv: float
    vx: np.ndarray
    vy: np.ndarray
    weights: np.ndarray                 # hv per node (midpoint rule)
    mom_x: np.ndarray = field(repr=False, default=None)   # rows hv*{1, v, v^2, v^3, v^4}
    mom_y: np.ndarray = field(repr=False, default=None)
    flux_x_plus: np.ndarray = field(repr=False, default=None)   # rows hv*{v+, v+^2, v+^3}
    flux_x_minus: np.ndarray = field(repr=False, default=None)

    @property
    def vx_plus(self):
        return np.maximum(self.vx, 0.0)

    @property
    def vx_minus(self):
        return np.minimum(self.vx, 0.0)


def build_velocity_grid(Vmax, Nv):
    """Cell-centered grid v_j = -Vmax + (j - 1/2) hv with hv = 2 Vmax / Nv."""
    if Nv < 2:
        raise ConfigurationError(f"Nv must be >= 2, got {Nv}")
    if Vmax <= 0:
        raise ConfigurationError(f"Vmax must be positive, got {Vmax}")
    hv = 2.0 * Vmax / Nv
    v = -Vmax + (np.arange(1, Nv + 1) - 0.5) * hv
    powers = hv * np.vstack([np.ones(Nv), v, v**2, v**3, v**4])
    vp = np.maximum(v, 0.0)
    vm = np.minimum(v, 0.0)
    return VelocityGrid(
        Vmax=Vmax,
        Nv=Nv,
        hv=hv,
        vx=v,
        vy=v.copy(),
        weights=np.full(Nv, hv),
        mom_x=powers,
        mom_y=powers.copy(),
        flux_x_plus=hv * np.vstack([vp, vp**2, vp**3]),
        flux_x_minus=hv * np.vstack([vm, vm**2, vm**3]),
    )
