import math

import numpy as np
import pytest

from elastospec.errors import AssemblyError, EigensolveError
from elastospec.fem_eigensolver import (
    assemble,
    convergence_study,
    solve_domain,
    solve_lowest,
)
from elastospec.kernel_asymptotics import BoundaryCondition
from elastospec.materials import LameParameters
from elastospec.mesh_geometry import Disk, Mesh, Rectangle, generate_mesh, refine

DIR = BoundaryCondition.DIRICHLET
NEU = BoundaryCondition.NEUMANN


def single_reference_triangle() -> Mesh:
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    triangles = np.array([[0, 1, 2]])
    edges = np.array([[0, 1], [1, 2], [2, 0]])
    flags = np.array([True, True, True])
    return Mesh(nodes, triangles, edges, flags, None)


# hand computation on the reference triangle, tau=1, mu=0 (area 1/2,
# gradients g0=(-1,-1), g1=(1,0), g2=(0,1)); dof order (0x,0y,1x,1y,2x,2y):
# K = area * (delta_ab * g_i.g_j  +  g_i[a]*g_j[b])
HAND_K = 0.5 * np.array(
    [
        [3, 1, -2, 0, -1, -1],
        [1, 3, -1, -1, 0, -2],
        [-2, -1, 2, 0, 0, 1],
        [0, -1, 0, 1, 0, 0],
        [-1, 0, 0, 0, 1, 0],
        [-1, -2, 1, 0, 0, 2],
    ],
    dtype=float,
)


class TestAssembly:
    def test_element_stiffness_matches_hand_computation(self):
        mesh = single_reference_triangle()
        K, _ = assemble(mesh, LameParameters(1.0, 0.0), NEU)
        assert np.allclose(K.toarray(), HAND_K, atol=1e-14)

    def test_stiffness_splits_into_laplacian_plus_divdiv(self):
        # at tau=1, mu=0 the stiffness is the componentwise scalar P1
        # Laplacian plus the rank-deficient div-div block
        mesh = single_reference_triangle()
        K, _ = assemble(mesh, LameParameters(1.0, 0.0), NEU)
        lap = 0.5 * np.array([[2, -1, -1], [-1, 1, 0], [-1, 0, 1]], dtype=float)
        lap_vector = np.kron(lap, np.eye(2))
        divdiv = K.toarray() - lap_vector
        assert np.allclose(divdiv, divdiv.T, atol=1e-14)
        rank = np.linalg.matrix_rank(divdiv, tol=1e-12)
        assert rank == 1  # (div u)(div v) has a one-dimensional range here

    def test_mass_row_sums(self):
        mesh = single_reference_triangle()
        _, M = assemble(mesh, LameParameters(1.0, 0.0), NEU)
        area = 0.5
        sums = np.asarray(M.sum(axis=1)).ravel()
        assert np.allclose(sums, area / 3.0)
        dense = M.toarray()
        assert dense[0, 0] == pytest.approx(2 * area / 12.0)
        assert dense[0, 2] == pytest.approx(area / 12.0)
        assert dense[0, 1] == 0.0  # components never couple in the mass

    def test_rigid_translations_in_kernel(self):
        mesh = generate_mesh(Disk(1.0), 0.3)
        K, _ = assemble(mesh, LameParameters(1.0, 1.0), NEU)
        for direction in ((1.0, 0.0), (0.0, 1.0)):
            u = np.tile(direction, mesh.node_count)
            assert np.linalg.norm(K @ u) < 1e-12 * np.linalg.norm(K.diagonal())

    def test_stiffness_positive_semidefinite(self):
        mesh = generate_mesh(Disk(1.0), 0.4)
        K, M = assemble(mesh, LameParameters(1.0, 1.0), NEU)
        rng = np.random.default_rng(0)
        X = rng.standard_normal((K.shape[0], 1000))
        quad = np.einsum("ij,ij->j", X, K @ X)
        assert np.all(quad >= -1e-10 * np.abs(quad).max())
        mass_quad = np.einsum("ij,ij->j", X, M @ X)
        assert np.all(mass_quad > 0.0)

    def test_dirichlet_reduction_positive_definite(self):
        mesh = generate_mesh(Rectangle(1.0, 1.0), 0.25)
        K, _ = assemble(mesh, LameParameters(1.0, 1.0), DIR)
        np.linalg.cholesky(K.toarray())  # raises if not PD

    def test_symmetry(self):
        mesh = generate_mesh(Disk(1.0), 0.3)
        for bc in (DIR, NEU):
            K, M = assemble(mesh, LameParameters(1.0, 0.5), bc)
            assert (K - K.T).nnz == 0 or np.abs((K - K.T).data).max() < 1e-14
            assert (M - M.T).nnz == 0 or np.abs((M - M.T).data).max() < 1e-14

    def test_empty_interior_rejected(self):
        mesh = generate_mesh(Rectangle(1.0, 1.0), 1.2)  # all nodes on boundary
        with pytest.raises(AssemblyError):
            assemble(mesh, LameParameters(1.0, 0.0), DIR)


class TestSolve:
    def test_neumann_zero_modes(self):
        spectrum = solve_domain(
            generate_mesh(Disk(1.0), 0.25), LameParameters(1.0, 1.0), NEU, 6
        )
        assert spectrum.eigenvalues[0] == 0.0
        assert spectrum.eigenvalues[1] == 0.0  # two rigid translations
        assert spectrum.eigenvalues[2] > 1e-6
        assert spectrum.provenance["near_zero_modes"] >= 2
        assert spectrum.provenance["neumann_realization"] == "natural-bc-approximation"

    def test_parameter_scaling_linearity(self):
        mesh = generate_mesh(Disk(1.0), 0.25)
        base = solve_domain(mesh, LameParameters(1.0, 0.5), DIR, 8)
        scaled = solve_domain(mesh, LameParameters(2.0, 1.0), DIR, 8)
        assert np.allclose(
            scaled.eigenvalues, 2.0 * base.eigenvalues, rtol=1e-10
        )

    def test_determinism_bitwise(self):
        mesh = generate_mesh(Disk(1.0), 0.3)
        a = solve_domain(mesh, LameParameters(1.0, 1.0), DIR, 6)
        b = solve_domain(mesh, LameParameters(1.0, 1.0), DIR, 6)
        assert np.array_equal(a.eigenvalues, b.eigenvalues)

    def test_refinement_monotonicity(self):
        # conforming P1 bounds eigenvalues from above
        mesh = generate_mesh(Rectangle(1.0, 1.0), 0.26)
        p = LameParameters(1.0, 1.0)
        coarse = solve_domain(mesh, p, DIR, 6).eigenvalues
        fine = solve_domain(refine(mesh), p, DIR, 6).eigenvalues
        assert np.all(fine <= coarse + 1e-9 * coarse)

    def test_rejects_positive_sigma(self):
        mesh = generate_mesh(Disk(1.0), 0.4)
        K, M = assemble(mesh, LameParameters(1.0, 0.0), DIR)
        with pytest.raises(EigensolveError):
            solve_lowest(K, M, 3, sigma=1.0)

    def test_rejects_out_of_range_k(self):
        mesh = generate_mesh(Rectangle(1.0, 1.0), 0.5)
        K, M = assemble(mesh, LameParameters(1.0, 0.0), DIR)
        with pytest.raises(EigensolveError):
            solve_lowest(K, M, K.shape[0] + 5)

    def test_ascending_and_positive_dirichlet(self):
        spectrum = solve_domain(
            generate_mesh(Disk(1.0), 0.2), LameParameters(1.0, 1.0), DIR, 12
        )
        eig = spectrum.eigenvalues
        assert np.all(np.diff(eig) >= 0.0)
        assert eig[0] > 0.0


class TestConvergenceStudy:
    def test_orders_and_extrapolation_flag(self):
        study = convergence_study(
            Disk(1.0), LameParameters(1.0, 1.0), DIR, k=5, levels=3, target_h0=0.25
        )
        assert study.extrapolated.provenance["extrapolated"] is True
        assert len(study.levels) == 3
        assert np.all(study.observed_orders > 1.5)
        assert np.all(study.observed_orders < 2.5)
        assert study.monotone

    def test_extrapolation_below_finest(self):
        study = convergence_study(
            Rectangle(1.0, 1.0), LameParameters(1.0, 0.0), DIR, k=4, levels=3,
            target_h0=0.26,
        )
        finest = study.levels[-1].eigenvalues
        assert np.all(study.extrapolated.eigenvalues <= finest)

    def test_requires_three_levels(self):
        with pytest.raises(ValueError):
            convergence_study(Disk(1.0), LameParameters(1.0, 0.0), DIR, 4, levels=2)
