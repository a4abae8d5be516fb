import numpy as np
import pytest

from lrbgk.discretization import build_dg, build_velocity_grid
from lrbgk.errors import ConfigurationError
from lrbgk.lowrank import LowRankMatrix
from lrbgk.moments import (
    compute_moment_field,
    compute_moments,
    moment_flux_pm,
    moment_fluxes_field,
    moment_rhs,
    primitive_from_conserved,
)
from lrbgk.qcm import discrete_maxwellian, QCMParams
from lrbgk.transport import BoundaryCondition, SolutionState, transport_rhs

from conftest import random_lowrank
from dense_oracle import dense_moment_fluxes, dense_moment_rhs, dense_moments, densify_state


@pytest.fixture
def vgrid():
    return build_velocity_grid(8.0, 32)


def test_moments_against_dense_riemann(rng, vgrid):
    for _ in range(20):
        A = random_lowrank(rng, vgrid.Nv, int(rng.integers(0, 5)))
        got = np.array(compute_moments(A, vgrid))
        expected = dense_moments(A.densify(), vgrid)
        assert np.abs(got - expected).max() < 1e-12 * max(1.0, np.abs(expected).max())


def test_moment_fluxes_against_dense(rng, vgrid):
    for _ in range(20):
        A = random_lowrank(rng, vgrid.Nv, int(rng.integers(1, 4)))
        ep, em = dense_moment_fluxes(A.densify(), vgrid)
        np.testing.assert_allclose(moment_flux_pm(A, vgrid, "+"), ep, atol=1e-11)
        np.testing.assert_allclose(moment_flux_pm(A, vgrid, "-"), em, atol=1e-11)
    with pytest.raises(ConfigurationError):
        moment_flux_pm(A, vgrid, "*")


def test_flux_halves_sum_to_full_flux(rng, vgrid):
    # F+ + F- equals the signed vx-weighted moments
    A = random_lowrank(rng, vgrid.Nv, 3)
    total = moment_flux_pm(A, vgrid, "+") + moment_flux_pm(A, vgrid, "-")
    F = A.densify()
    VX = vgrid.vx[:, None]
    VY = vgrid.vy[None, :]
    hv2 = vgrid.hv**2
    expected = np.array(
        [
            hv2 * (VX * F).sum(),
            hv2 * (VX**2 * F).sum(),
            hv2 * (VX * VY * F).sum(),
            0.5 * hv2 * ((VX**3 + VX * VY**2) * F).sum(),
        ]
    )
    np.testing.assert_allclose(total, expected, atol=1e-11)


def test_maxwellian_moments(vgrid):
    M = discrete_maxwellian(QCMParams(1.2, 0.3, -0.4, 0.9), vgrid)
    got = np.array(compute_moments(M, vgrid))
    expected = dense_moments(M.densify(), vgrid)
    np.testing.assert_allclose(got, expected, atol=1e-13)
    # midpoint rule on a wide grid is spectrally accurate for Gaussians
    analytic = np.array([1.2, 1.2 * 0.3, 1.2 * -0.4, 0.5 * 1.2 * (0.3**2 + 0.4**2 + 2 * 0.9)])
    np.testing.assert_allclose(got, analytic, atol=1e-9)


def test_mirror_symmetry(rng, vgrid):
    # reversing the vx axis flips the signs of n*ux and the x fluxes swap roles
    A = random_lowrank(rng, vgrid.Nv, 3)
    mirrored = LowRankMatrix(A.left[::-1].copy(), A.core, A.right)
    m = np.array(compute_moments(A, vgrid))
    mm = np.array(compute_moments(mirrored, vgrid))
    np.testing.assert_allclose(mm, [m[0], -m[1], m[2], m[3]], atol=1e-12)


def test_moment_transport_commutes_with_kinetic_transport(rng):
    # moments of the kinetic RHS equal the moment-system RHS (shared stencil)
    disc = build_dg(0.0, 2.0 * np.pi, 6, 2)
    vgrid = build_velocity_grid(4.0, 16)
    C = [[random_lowrank(rng, 16, 2) for _ in range(3)] for _ in range(6)]
    state = SolutionState(C, 0.0)
    bc = BoundaryCondition("periodic")
    rhs = transport_rhs(state, bc, disc, vgrid, 1e-14)
    kinetic_moments = compute_moment_field(SolutionState(rhs, 0.0), vgrid)
    P = moment_rhs(*moment_fluxes_field(state, vgrid), bc, disc)
    assert np.abs(kinetic_moments - P).max() < 1e-10


def test_moment_rhs_against_dense_oracle(rng):
    disc = build_dg(0.0, 2.0 * np.pi, 5, 1)
    vgrid = build_velocity_grid(3.0, 12)
    C = [[random_lowrank(rng, 12, 2) for _ in range(2)] for _ in range(5)]
    state = SolutionState(C, 0.0)
    bc = BoundaryCondition("periodic")
    P = moment_rhs(*moment_fluxes_field(state, vgrid), bc, disc)
    expected = dense_moment_rhs(densify_state(state), disc, vgrid)
    assert np.abs(P - expected).max() < 1e-10


def test_telescoping_conservation(rng):
    # periodic quadrature totals of the moment RHS vanish identically
    disc = build_dg(0.0, 2.0 * np.pi, 8, 2)
    vgrid = build_velocity_grid(4.0, 16)
    C = [[random_lowrank(rng, 16, 2) for _ in range(3)] for _ in range(8)]
    state = SolutionState(C, 0.0)
    bc = BoundaryCondition("periodic")
    P = moment_rhs(*moment_fluxes_field(state, vgrid), bc, disc)
    totals = disc.hx * np.einsum("p,ipc->c", disc.w, P)
    assert np.abs(totals).max() < 1e-12


def test_primitive_round_trip():
    U = np.array([1.3, 0.26, -0.39, 1.5])
    n, ux, uy, T = primitive_from_conserved(U)
    assert abs(n - 1.3) < 1e-15
    assert abs(ux - 0.2) < 1e-15
    assert abs(uy + 0.3) < 1e-15
    E = 0.5 * (n * (ux**2 + uy**2) + 2 * n * T)
    assert abs(E - 1.5) < 1e-13


def test_zero_matrix_moments(vgrid):
    Z = LowRankMatrix.zero(vgrid.Nv)
    assert np.array(compute_moments(Z, vgrid)).max() == 0.0
    np.testing.assert_array_equal(moment_flux_pm(Z, vgrid, "+"), np.zeros(4))
