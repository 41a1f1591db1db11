"""Meshing, kernel assembly, equilibrium measures and Riesz energies."""

import math

import numpy as np
import pytest

from flatdrop import capacity as cap
from flatdrop import geometry as g
from flatdrop.specfun import SQUARE_SELF_INTERACTION, elliptic_K

UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


def manual_mesh(centroids, cell_h):
    centroids = np.atleast_2d(np.asarray(centroids, dtype=float))
    n = len(centroids)
    parent = g.PlanarSet([UNIT_SQUARE])
    return cap.Mesh(
        centroids=centroids,
        areas=np.full(n, cell_h**2),
        h_eff=np.full(n, cell_h),
        component_id=np.arange(n),
        boundary_dist=np.ones(n),
        parent=parent,
        resolution=cell_h,
        grading="uniform",
    )


def random_star(rng, center=(0.0, 0.0)):
    n = int(rng.integers(8, 16))
    ang = np.sort(rng.uniform(0, 2 * math.pi, n)) + np.arange(n) * 1e-9
    rad = rng.uniform(0.4, 1.0, n)
    return g.PlanarSet(
        [np.column_stack([center[0] + rad * np.cos(ang), center[1] + rad * np.sin(ang)])]
    )


class TestBuildMesh:
    def test_unit_square_uniform(self):
        mesh = cap.build_mesh(g.PlanarSet([UNIT_SQUARE]), 0.1, grading="uniform")
        assert len(mesh) == 100
        assert mesh.areas.sum() == pytest.approx(1.0, abs=1e-9)
        assert np.allclose(mesh.areas, 0.01)

    def test_centroids_inside(self):
        disk = g.make_disk(1.0, 128)
        mesh = cap.build_mesh(disk, 0.05)
        assert disk.contains_points(mesh.centroids).all()

    def test_area_partition(self):
        for grading in ("uniform", "boundary-graded"):
            disk = g.make_disk(1.0, 256)
            mesh = cap.build_mesh(disk, 0.1, grading=grading)
            assert mesh.areas.sum() == pytest.approx(g.area(disk), rel=1e-9)

    def test_graded_quarter_cells(self):
        h = 0.1
        disk = g.make_disk(1.0, 256)
        mesh = cap.build_mesh(disk, h, grading="boundary-graded")
        # interior full cells at h^2, graded band cells at (h/2)^2
        assert np.any(np.isclose(mesh.areas, h * h))
        quarter = np.isclose(mesh.areas, 0.25 * h * h)
        assert quarter.sum() > 0
        assert np.all(mesh.boundary_dist[np.isclose(mesh.areas, h * h)] > 2.0 * h)

    def test_star_mesh_valid(self):
        rng = np.random.default_rng(0)
        star = random_star(rng)
        mesh = cap.build_mesh(star, 0.08)
        assert mesh.areas.sum() == pytest.approx(g.area(star), rel=1e-9)
        assert star.contains_points(mesh.centroids).all()

    def test_multicomponent_ids(self):
        far = [(x + 4.0, y) for x, y in UNIT_SQUARE]
        s = g.PlanarSet([UNIT_SQUARE, far])
        mesh = cap.build_mesh(s, 0.2, grading="uniform")
        assert set(np.unique(mesh.component_id)) == {0, 1}

    def test_too_coarse(self):
        with pytest.raises(ValueError):
            cap.build_mesh(g.PlanarSet([UNIT_SQUARE]), 0.9, grading="uniform")
        with pytest.raises(ValueError):
            cap.build_mesh(g.PlanarSet([UNIT_SQUARE]), 5.0)

    def test_unknown_grading(self):
        with pytest.raises(ValueError):
            cap.build_mesh(g.PlanarSet([UNIT_SQUARE]), 0.1, grading="adaptive")


class TestKernel:
    def test_far_pair_is_inverse_distance(self):
        mesh = manual_mesh([(0.0, 0.0), (2.0, 0.0)], cell_h=0.1)
        k = cap.assemble_kernel(mesh)
        assert k[0, 1] == 0.5
        assert k[1, 0] == 0.5

    def test_diagonal_self_term(self):
        mesh = manual_mesh([(0.0, 0.0)], cell_h=0.2)
        k = cap.assemble_kernel(mesh)
        assert k[0, 0] == SQUARE_SELF_INTERACTION / 0.2

    def test_near_pair_upgraded(self):
        # adjacent unit cells: exact pair mean, QMC oracle value 1.112117(2)
        mesh = manual_mesh([(0.0, 0.0), (1.0, 0.0)], cell_h=1.0)
        k = cap.assemble_kernel(mesh)
        assert k[0, 1] == pytest.approx(1.1121286898490055, rel=1e-12)
        assert abs(k[0, 1] - 1.11211717) < 3e-5
        plain = cap.assemble_kernel(mesh, near_field=0.0)
        assert plain[0, 1] == 1.0

    def test_symmetric_positive(self):
        disk = g.make_disk(1.0, 64)
        mesh = cap.build_mesh(disk, 0.2)
        k = cap.assemble_kernel(mesh)
        assert np.array_equal(k, k.T)
        assert np.all(np.diag(k) > 0)
        eigmin = np.linalg.eigvalsh(k).min()
        assert eigmin > 0.0

    def test_coincident_centroids(self):
        mesh = manual_mesh([(0.0, 0.0), (0.0, 0.0)], cell_h=0.1)
        with pytest.raises(ValueError):
            cap.assemble_kernel(mesh)


class TestEquilibrium:
    def test_single_cell(self):
        mesh = manual_mesh([(0.0, 0.0)], cell_h=0.2)
        measure = cap.equilibrium_measure(mesh)
        assert measure.weights.tolist() == [1.0]
        assert measure.energy == SQUARE_SELF_INTERACTION / 0.2

    def test_two_cells_symmetric(self):
        mesh = manual_mesh([(0.0, 0.0), (7.0, 0.0)], cell_h=0.2)
        measure = cap.equilibrium_measure(mesh)
        assert measure.weights == pytest.approx([0.5, 0.5], abs=1e-14)

    def test_disk_density_profile(self):
        disk = g.make_disk(1.0, 256)
        mesh = cap.build_mesh(disk, 0.08)
        measure = cap.equilibrium_measure(mesh)
        inner = mesh.boundary_dist > 0.2
        r = np.linalg.norm(mesh.centroids[inner], axis=1)
        predicted = 1.0 / (2.0 * math.pi * np.sqrt(1.0 - r * r))
        assert np.max(np.abs(measure.densities()[inner] / predicted - 1.0)) < 0.05

    def test_any_feasible_weights_above_optimum(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            star = random_star(rng)
            mesh = cap.build_mesh(star, 0.12)
            kernel = cap.assemble_kernel(mesh)
            eq = cap.equilibrium_measure(mesh, kernel)
            uniform = cap.DiscreteMeasure(mesh, np.full(len(mesh), 1.0 / len(mesh)))
            assert cap.measure_energy(uniform, kernel) >= eq.energy
            w = rng.random(len(mesh))
            random_measure = cap.DiscreteMeasure(mesh, w / w.sum())
            assert cap.measure_energy(random_measure, kernel) >= eq.energy

    def test_measure_validation(self):
        mesh = manual_mesh([(0.0, 0.0), (1.0, 0.0)], cell_h=0.1)
        with pytest.raises(ValueError):
            cap.DiscreteMeasure(mesh, np.array([0.7, 0.7]))
        with pytest.raises(ValueError):
            cap.DiscreteMeasure(mesh, np.array([1.5, -0.5]))


class TestRieszEnergy:
    def test_disk_within_one_percent(self):
        disk = g.make_disk(1.0, 256)
        res = cap.riesz_energy(disk, [0.32, 0.16, 0.08])
        assert res.extrapolated == pytest.approx(math.pi / 2.0, rel=0.01)
        assert res.residual < 1e-10 * res.energy
        assert res.extrapolated <= max(res.energies)
        assert 0.5 < res.fitted_order < 2.0

    def test_ellipse_within_one_percent(self):
        ell = g.make_ellipse(g.EllipseSpec(1.0, 0.7), 512)
        res = cap.riesz_energy(ell, [0.3, 0.15, 0.075])
        assert res.extrapolated == pytest.approx(elliptic_K(0.49), rel=0.01)

    def test_monotone_decreasing_upper_bounds(self):
        disk = g.make_disk(1.0, 256)
        res = cap.riesz_energy(disk, [0.32, 0.16, 0.08])
        assert res.energies[0] > res.energies[1] > res.energies[2]
        assert all(e > math.pi / 2.0 for e in res.energies)

    def test_radius_two_disk(self):
        disk2 = g.make_disk(2.0, 256)
        res = cap.riesz_energy(disk2, [0.64, 0.32, 0.16])
        assert res.extrapolated == pytest.approx(math.pi / 4.0, rel=0.01)

    def test_dilation_covariance_exact(self):
        disk = g.make_disk(1.0, 256)
        m1 = cap.build_mesh(disk, 0.16)
        m2 = cap.build_mesh(disk.scaled(2.0), 0.32)
        k1 = cap.assemble_kernel(m1)
        k2 = cap.assemble_kernel(m2)
        assert np.array_equal(k2, 0.5 * k1)
        e1 = cap.equilibrium_measure(m1, k1).energy
        e2 = cap.equilibrium_measure(m2, k2).energy
        assert e2 == pytest.approx(0.5 * e1, rel=1e-12)

    def test_translation_invariance(self):
        disk = g.make_disk(1.0, 256)
        base = cap.equilibrium_measure(cap.build_mesh(disk, 0.16)).energy
        for vec in ((3.0, -1.0), (0.125, 7.5)):
            moved = cap.equilibrium_measure(
                cap.build_mesh(disk.translated(vec), 0.16)
            ).energy
            assert moved == pytest.approx(base, rel=1e-12)

    def test_extrapolate_needs_three(self):
        disk = g.make_disk(1.0, 64)
        with pytest.raises(ValueError):
            cap.riesz_energy(disk, [0.2, 0.1], extrapolate=True)
        with pytest.raises(ValueError):
            cap.riesz_energy(disk, [])

    def test_no_extrapolation_returns_finest(self):
        disk = g.make_disk(1.0, 64)
        res = cap.riesz_energy(disk, [0.2], extrapolate=False)
        assert res.extrapolated == res.energy
        assert math.isnan(res.fitted_order)


class TestCapacityC1:
    def test_unit_disk(self):
        disk = g.make_disk(1.0, 256)
        c1 = cap.capacity_C1(disk, [0.32, 0.16, 0.08])
        assert c1 == pytest.approx(2.0 / math.pi, rel=0.01)

    def test_homogeneity(self):
        small = g.PlanarSet([UNIT_SQUARE])
        big = small.scaled(2.0)
        c_small = cap.capacity_C1(small, [0.16, 0.08, 0.04])
        c_big = cap.capacity_C1(big, [0.32, 0.16, 0.08])
        assert c_big / c_small == pytest.approx(2.0, rel=0.02)


class TestInteraction:
    def test_point_like_cells(self):
        a = g.PlanarSet([UNIT_SQUARE])
        b = g.PlanarSet([[(x + 4.0, y) for x, y in UNIT_SQUARE]])
        # single-cell measures at distance 4
        mesh_a = cap.Mesh(
            np.array([[0.5, 0.5]]), np.array([1.0]), np.array([1.0]),
            np.array([0]), np.array([0.5]), a, 1.0, "uniform",
        )
        mesh_b = cap.Mesh(
            np.array([[4.5, 0.5]]), np.array([1.0]), np.array([1.0]),
            np.array([0]), np.array([0.5]), b, 1.0, "uniform",
        )
        w = np.array([1.0])
        val = cap.interaction_energy(
            cap.DiscreteMeasure(mesh_a, w), cap.DiscreteMeasure(mesh_b, w)
        )
        assert val == 0.25

    def test_bound_and_symmetry(self):
        rng = np.random.default_rng(5)
        a = random_star(rng)
        b = random_star(rng, center=(4.0, 0.0))
        ma = cap.equilibrium_measure(cap.build_mesh(a, 0.15))
        mb = cap.equilibrium_measure(cap.build_mesh(b, 0.15))
        v1 = cap.interaction_energy(ma, mb)
        v2 = cap.interaction_energy(mb, ma)
        assert v1 == v2
        assert v1 <= 1.0 / g.set_distance(a, b)

    def test_overlapping_supports_rejected(self):
        rng = np.random.default_rng(6)
        a = random_star(rng)
        b = a.translated((0.1, 0.0))
        ma = cap.equilibrium_measure(cap.build_mesh(a, 0.15))
        mb = cap.equilibrium_measure(cap.build_mesh(b, 0.15))
        with pytest.raises(g.GeometryError):
            cap.interaction_energy(ma, mb)


class TestPartitionBounds:
    def test_upper_and_lower(self):
        rng = np.random.default_rng(77)
        for k in range(3):
            s1 = random_star(rng)
            s2 = random_star(rng, center=(3.5 + 0.4 * k, 0.3))
            union = g.PlanarSet([s1.components[0], s2.components[0]])
            gap = g.set_distance(s1, s2)
            mesh = cap.build_mesh(union, 0.12)
            kernel = cap.assemble_kernel(mesh)
            w, e_union, _ = cap._equilibrium_weights(kernel)
            in1 = mesh.component_id == 0
            e1 = cap._equilibrium_weights(kernel[np.ix_(in1, in1)])[1]
            e2 = cap._equilibrium_weights(kernel[np.ix_(~in1, ~in1)])[1]
            for theta in (0.0, 0.25, 0.5, 0.75, 1.0):
                bound = (
                    theta**2 * e1
                    + (1.0 - theta) ** 2 * e2
                    + 2.0 * theta * (1.0 - theta) / gap
                )
                assert e_union <= bound * 1.02
            theta_bar = float(w[in1].sum())
            assert 0.0 < theta_bar < 1.0
            recombined = theta_bar**2 * e1 + (1.0 - theta_bar) ** 2 * e2
            assert e_union > recombined


def test_solver_error_carries_residual():
    err = cap.SolverError("did not converge", 0.125)
    assert err.residual == 0.125
    assert "1.250e-01" in str(err)
