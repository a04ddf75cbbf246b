import numpy as np
import pytest

from cliquesnl.errors import DimensionMismatch, InternalError, InvalidInput
from cliquesnl.cliques import build_clique_cover
from cliquesnl.graph import generate_rgg, graph_from_points, apply_noise
from cliquesnl.mds import (
    RigidTransform,
    cmds,
    localize_configuration,
    localize_patch,
    procrustes_align,
    refine_patch_stress,
)
from cliquesnl.rigidity import build_configuration

from oracles import grid_polish_rigid_align


def pairwise(points):
    points = np.asarray(points, dtype=float)
    diffs = points[:, None, :] - points[None, :, :]
    return np.sqrt((diffs**2).sum(axis=2))


class TestCmds:
    def test_two_points(self):
        coords, quality = cmds(np.array([[0.0, 1.0], [1.0, 0.0]]), 2)
        assert np.linalg.norm(coords[0] - coords[1]) == pytest.approx(1.0, abs=1e-12)
        assert quality.rank_used == 1
        assert quality.neg_eigen_mass == pytest.approx(0.0, abs=1e-12)

    def test_right_triangle_3_4_5(self):
        dist = np.array([[0.0, 3.0, 5.0], [3.0, 0.0, 4.0], [5.0, 4.0, 0.0]])
        coords, quality = cmds(dist, 2)
        assert np.allclose(pairwise(coords), dist, atol=1e-9)
        assert quality.rank_used == 2

    @pytest.mark.parametrize("seed", range(20))
    def test_exact_planar_distances_recovered(self, seed):
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-1, 1, size=(int(rng.integers(3, 12)), 2))
        coords, quality = cmds(pairwise(pts), 2)
        assert np.allclose(pairwise(coords), pairwise(pts), atol=1e-9)
        assert quality.rank_used <= 2
        assert quality.neg_eigen_mass <= 1e-12

    def test_embedding_is_centered(self):
        rng = np.random.default_rng(3)
        pts = rng.uniform(-1, 1, size=(6, 2))
        coords, _ = cmds(pairwise(pts), 2)
        assert np.allclose(coords.mean(axis=0), 0.0, atol=1e-9)

    def test_collinear_points_rank_one(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [2.5, 0.0]])
        coords, quality = cmds(pairwise(pts), 2)
        assert quality.rank_used == 1
        assert np.allclose(pairwise(coords), pairwise(pts), atol=1e-9)

    def test_noisy_distances_report_negative_mass(self):
        rng = np.random.default_rng(0)
        pts = rng.uniform(-1, 1, size=(8, 2))
        dist = pairwise(pts) * (1 + rng.normal(0, 0.1, size=(8, 8)))
        dist = (dist + dist.T) / 2
        np.fill_diagonal(dist, 0.0)
        dist = np.abs(dist)
        _, quality = cmds(dist, 2)
        assert quality.neg_eigen_mass > 0

    def test_single_point_pads_to_dim(self):
        coords, quality = cmds(np.zeros((1, 1)), 2)
        assert coords.shape == (1, 2)
        assert np.allclose(coords, 0.0)

    def test_validation(self):
        with pytest.raises(DimensionMismatch):
            cmds(np.zeros((2, 3)), 2)
        with pytest.raises(InvalidInput):
            cmds(np.array([[0.0, -1.0], [-1.0, 0.0]]), 2)
        with pytest.raises(InvalidInput):
            cmds(np.zeros((2, 2)), 0)


class TestProcrustesAlign:
    def test_identity_when_already_aligned(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
        t = procrustes_align(pts, pts)
        assert np.allclose(t.rotation, np.eye(2), atol=1e-12)
        assert np.allclose(t.translation, 0.0, atol=1e-12)

    def test_quarter_turn_recovered(self):
        rot = np.array([[0.0, -1.0], [1.0, 0.0]])
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [3.0, 1.0]])
        targets = pts @ rot.T
        t = procrustes_align(pts, targets)
        assert np.allclose(t.rotation, rot, atol=1e-12)
        assert np.allclose(t.apply(pts), targets, atol=1e-9)

    @pytest.mark.parametrize("seed", range(10))
    def test_known_transform_recovery(self, seed):
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((5, 2))
        theta = rng.uniform(0, 2 * np.pi)
        rot = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        )
        if seed % 2:
            rot = rot @ np.diag([1.0, -1.0])  # reflections are fair game
        shift = rng.standard_normal(2)
        targets = pts @ rot.T + shift
        t = procrustes_align(pts, targets)
        assert np.linalg.norm(t.apply(pts) - targets) <= 1e-9

    def test_single_pair_is_translation(self):
        t = procrustes_align(np.array([[1.0, 2.0]]), np.array([[4.0, 6.0]]))
        assert np.allclose(t.rotation, np.eye(2))
        assert np.allclose(t.translation, [3.0, 4.0])

    @pytest.mark.parametrize("seed", range(15))
    def test_residual_matches_grid_oracle(self, seed):
        rng = np.random.default_rng(seed + 100)
        n = int(rng.integers(2, 5))
        pts = rng.standard_normal((n, 2))
        targets = rng.standard_normal((n, 2))
        t = procrustes_align(pts, targets)
        residual = float(((t.apply(pts) - targets) ** 2).sum())
        oracle = grid_polish_rigid_align(pts, targets)
        assert residual <= oracle + 1e-7
        assert abs(residual - oracle) <= 1e-7

    def test_validation(self):
        with pytest.raises(DimensionMismatch):
            procrustes_align(np.zeros((2, 2)), np.zeros((3, 2)))
        with pytest.raises(InvalidInput):
            procrustes_align(np.zeros((0, 2)), np.zeros((0, 2)))


class TestRigidTransform:
    def test_compose_application_order(self):
        rot = np.array([[0.0, -1.0], [1.0, 0.0]])
        f = RigidTransform(rotation=rot, translation=np.array([1.0, 0.0]))
        g = RigidTransform(rotation=np.eye(2), translation=np.array([0.0, 2.0]))
        x = np.array([[1.0, 1.0]])
        assert np.allclose(f.compose(g).apply(x), f.apply(g.apply(x)))


class TestRefinePatchStress:
    def exact_instance(self, seed=0):
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-1, 1, size=(5, 2))
        coords = {v + 1: pts[v].copy() for v in range(5)}
        dists = {
            (i + 1, j + 1): float(np.linalg.norm(pts[i] - pts[j]))
            for i in range(5)
            for j in range(i + 1, 5)
        }
        return coords, dists

    def strain_of(self, coords, dists):
        return sum(
            (np.sum((coords[i] - coords[j]) ** 2) - d**2) ** 2
            for (i, j), d in dists.items()
        )

    def test_exact_minimum_unchanged(self):
        coords, dists = self.exact_instance()
        refined = refine_patch_stress(coords, dists, fixed_ids=())
        for v in coords:
            assert np.allclose(refined[v], coords[v], atol=1e-9)

    def test_perturbed_instance_strain_decreases(self):
        coords, dists = self.exact_instance()
        rng = np.random.default_rng(1)
        noisy = {v: c + rng.normal(0, 0.05, size=2) for v, c in coords.items()}
        before = self.strain_of(noisy, dists)
        refined = refine_patch_stress(noisy, dists, fixed_ids=())
        after = self.strain_of(refined, dists)
        assert after < before

    def test_fixed_ids_pinned(self):
        coords, dists = self.exact_instance()
        rng = np.random.default_rng(2)
        noisy = {v: c + rng.normal(0, 0.05, size=2) for v, c in coords.items()}
        refined = refine_patch_stress(noisy, dists, fixed_ids=(1, 2))
        assert np.array_equal(refined[1], noisy[1])
        assert np.array_equal(refined[2], noisy[2])


def complete_graph_from(points, anchor_rows, radio_range=10.0):
    return graph_from_points(points, anchor_indices=anchor_rows, radio_range=radio_range)


class TestLocalizePatch:
    def test_anchor_free_triangle_reproduces_distances(self):
        pts = np.array([[0.0, 0.0], [3.0, 0.0], [3.0, 4.0], [10.0, 10.0]])
        g = complete_graph_from(pts, anchor_rows=[3], radio_range=30.0)
        patch = localize_patch((1, 2, 3), g)
        got = np.array([patch.coords[v] for v in (1, 2, 3)])
        assert np.allclose(pairwise(got), pairwise(pts[:3]), atol=1e-9)
        assert patch.anchors == ()

    def test_two_anchor_clique_exact(self):
        rng = np.random.default_rng(4)
        pts = rng.uniform(-0.5, 0.5, size=(6, 2))
        g = complete_graph_from(pts, anchor_rows=[4, 5])
        members = tuple(range(1, 7))  # all sensors plus both anchors
        patch = localize_patch(members, g)
        for a in g.anchors():
            assert np.array_equal(patch.coords[a], g.anchor_positions[a])
        got = np.array([patch.coords[v] for v in members])
        true = np.array([g.true_position(v) for v in members])
        assert np.allclose(pairwise(got), pairwise(true), atol=1e-9)

    def test_three_anchor_clique_pins_positions(self):
        rng = np.random.default_rng(5)
        pts = rng.uniform(-0.5, 0.5, size=(7, 2))
        g = complete_graph_from(pts, anchor_rows=[4, 5, 6])
        members = tuple(range(1, 8))
        patch = localize_patch(members, g)
        for v in members:
            assert np.allclose(patch.coords[v], g.true_position(v), atol=1e-7)

    def test_noisy_clique_reports_negative_mass(self):
        rng = np.random.default_rng(6)
        pts = rng.uniform(-0.5, 0.5, size=(8, 2))
        g = complete_graph_from(pts, anchor_rows=[7])
        noisy = apply_noise(g, 0.1, seed=6)
        patch = localize_patch(tuple(range(1, 8)), noisy)
        assert patch.quality.neg_eigen_mass > 0

    def test_missing_edge_raises(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 5.0], [0.0, 1.0]])
        g = complete_graph_from(pts, anchor_rows=[3], radio_range=2.0)
        with pytest.raises(InternalError):
            localize_patch((1, 2, 3), g)  # sensor 3 sits far from 1 and 2

    def test_refine_flag_off_still_exact(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [2.0, 2.0]])
        g = complete_graph_from(pts, anchor_rows=[3], radio_range=10.0)
        patch = localize_patch((1, 2, 3), g, refine=False)
        got = np.array([patch.coords[v] for v in (1, 2, 3)])
        assert np.allclose(pairwise(got), pairwise(pts[:3]), atol=1e-9)


class TestLocalizeConfiguration:
    def test_fills_coords_and_quality(self):
        g = generate_rgg(25, 4, 0.4, seed=9)
        cover = build_clique_cover(g)
        cfg = build_configuration(cover, g)
        localized = localize_configuration(cfg, g)
        assert localized.local_coords is not None
        assert len(localized.local_coords) == cfg.n_patches
        assert len(localized.quality) == cfg.n_patches
        for members, coords in zip(localized.patches, localized.local_coords):
            assert set(coords) == set(members)

    def test_exact_patches_reproduce_distances(self):
        g = generate_rgg(25, 4, 0.4, seed=9)
        cover = build_clique_cover(g)
        cfg = build_configuration(cover, g)
        localized = localize_configuration(cfg, g)
        for members, coords in zip(localized.patches, localized.local_coords):
            for a in range(len(members)):
                for b in range(a + 1, len(members)):
                    i, j = members[a], members[b]
                    got = np.linalg.norm(coords[i] - coords[j])
                    assert got == pytest.approx(g.distance(i, j), abs=1e-9)

    def test_anchor_members_exactly_placed(self):
        g = generate_rgg(25, 4, 0.4, seed=9)
        cover = build_clique_cover(g)
        cfg = build_configuration(cover, g)
        localized = localize_configuration(cfg, g)
        for members, coords in zip(localized.patches, localized.local_coords):
            for v in members:
                if g.is_anchor(v):
                    assert np.array_equal(coords[v], g.anchor_positions[v])
