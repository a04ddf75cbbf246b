import numpy as np
import pytest

from cliquesnl.errors import DegenerateRoundingWarning, DimensionMismatch, InvalidInput
from cliquesnl.numerics import (
    project_block_identity,
    project_orthogonal,
    project_psd,
    project_simplex,
    svd_small,
    sym_eig,
)

class TestSymEig:
    def test_identity(self):
        dec = sym_eig(np.eye(3))
        assert np.allclose(dec.values, [1.0, 1.0, 1.0])
        assert np.allclose(dec.vectors @ dec.vectors.T, np.eye(3))

    def test_diagonal_sorted_descending(self):
        dec = sym_eig(np.diag([5.0, -2.0]))
        assert np.allclose(dec.values, [5.0, -2.0])

    def test_two_by_two_hand_values(self):
        # [[2,1],[1,2]] has eigenpairs 3 with (1,1)/sqrt2 and 1 with (1,-1)/sqrt2.
        dec = sym_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(dec.values, [3.0, 1.0])
        v0 = dec.vectors[:, 0]
        v1 = dec.vectors[:, 1]
        assert np.allclose(np.abs(v0), [1 / np.sqrt(2)] * 2, atol=1e-12)
        assert np.allclose(np.abs(v1 @ np.array([1.0, 1.0])), 0.0, atol=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    @pytest.mark.parametrize("n", [2, 5, 17])
    def test_reconstruction(self, seed, n):
        rng = np.random.default_rng(seed)
        s = rng.standard_normal((n, n))
        s = (s + s.T) / 2
        dec = sym_eig(s)
        recon = (dec.vectors * dec.values) @ dec.vectors.T
        assert np.linalg.norm(recon - s) <= 1e-9 * (1.0 + np.linalg.norm(s))
        assert np.all(np.diff(dec.values) <= 1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInput):
            sym_eig(np.array([[1.0, np.nan], [np.nan, 1.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            sym_eig(np.ones((2, 3)))


class TestSvdSmall:
    def test_identity(self):
        dec = svd_small(np.eye(2))
        assert np.allclose(dec.sigma, [1.0, 1.0])
        assert np.allclose(dec.reconstruct(), np.eye(2))

    def test_singular_diagonal(self):
        dec = svd_small(np.diag([3.0, 0.0]))
        assert np.allclose(dec.sigma, [3.0, 0.0])

    def test_rotation_input(self):
        theta = np.pi / 2
        rot = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        )
        dec = svd_small(rot)
        assert np.allclose(dec.sigma, [1.0, 1.0])
        assert np.allclose(dec.u @ dec.v.T, rot)

    @pytest.mark.parametrize("seed", range(8))
    def test_reconstruction_random(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.standard_normal((3, 2))
        dec = svd_small(m)
        assert np.allclose(dec.reconstruct(), m, atol=1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInput):
            svd_small(np.array([[np.inf, 0.0], [0.0, 1.0]]))


class TestProjectPsd:
    def test_psd_unchanged(self):
        s = np.array([[2.0, 0.5], [0.5, 1.0]])
        assert np.allclose(project_psd(s), s, atol=1e-12)

    def test_clips_negative_eigenvalue(self):
        assert np.allclose(project_psd(np.diag([2.0, -3.0])), np.diag([2.0, 0.0]))

    def test_offdiagonal_hand_value(self):
        # [[0,1],[1,0]] has eigenvalues +-1; clipping leaves 0.5 * ones.
        out = project_psd(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(out, np.full((2, 2), 0.5), atol=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_result_is_nearest_psd(self, seed):
        # Variational characterization: for the projection p of s onto the
        # psd cone, <s - p, q - p> <= 0 for every psd q.
        rng = np.random.default_rng(seed)
        s = rng.standard_normal((4, 4))
        s = (s + s.T) / 2
        p = project_psd(s)
        eigvals = np.linalg.eigvalsh(p)
        assert eigvals.min() >= -1e-12
        for _ in range(20):
            base = rng.standard_normal((4, 4))
            q = base @ base.T
            assert ((s - p) * (q - p)).sum() <= 1e-9

    @pytest.mark.parametrize("seed", range(5))
    def test_idempotent_and_nonexpansive(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((5, 5))
        a = (a + a.T) / 2
        b = rng.standard_normal((5, 5))
        b = (b + b.T) / 2
        pa, pb = project_psd(a), project_psd(b)
        assert np.allclose(project_psd(pa), pa, atol=1e-10)
        assert np.linalg.norm(pa - pb) <= np.linalg.norm(a - b) + 1e-12


class TestProjectBlockIdentity:
    def test_diagonal_blocks_replaced(self):
        s = np.arange(16.0).reshape(4, 4)
        s = (s + s.T) / 2
        out = project_block_identity(s, 2)
        assert np.allclose(out[:2, :2], np.eye(2))
        assert np.allclose(out[2:, 2:], np.eye(2))
        assert np.allclose(out[:2, 2:], s[:2, 2:])

    def test_rejects_bad_block_size(self):
        with pytest.raises(DimensionMismatch):
            project_block_identity(np.eye(5), 2)

    @pytest.mark.parametrize("seed", range(5))
    def test_idempotent_and_nonexpansive(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((6, 6))
        a = (a + a.T) / 2
        b = rng.standard_normal((6, 6))
        b = (b + b.T) / 2
        pa = project_block_identity(a, 2)
        pb = project_block_identity(b, 2)
        assert np.allclose(project_block_identity(pa, 2), pa)
        assert np.linalg.norm(pa - pb) <= np.linalg.norm(a - b) + 1e-12


class TestProjectOrthogonal:
    def test_orthogonal_fixed_point(self):
        theta = 0.7
        rot = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        )
        assert np.allclose(project_orthogonal(rot), rot, atol=1e-12)

    def test_scaling_removed(self):
        assert np.allclose(project_orthogonal(2.0 * np.eye(2)), np.eye(2))

    def test_reflection_preserved(self):
        refl = np.array([[1.0, 0.0], [0.0, -1.0]])
        out = project_orthogonal(3.0 * refl)
        assert np.allclose(out, refl)
        assert np.linalg.det(out) < 0

    @pytest.mark.parametrize("seed", range(20))
    def test_nearest_orthogonal_against_grid_oracle(self, seed):
        # Minimizing ||O - M||_F over O(2) is the targets-free special case
        # of rigid alignment of the rows of I onto the rows of M^T ... easier
        # to check directly: compare against a dense angle grid.
        rng = np.random.default_rng(seed)
        m = rng.standard_normal((2, 2))
        out = project_orthogonal(m)
        assert np.allclose(out @ out.T, np.eye(2), atol=1e-10)
        best = np.inf
        for reflect in (False, True):
            for theta in np.linspace(0, 2 * np.pi, 20000, endpoint=False):
                c, s = np.cos(theta), np.sin(theta)
                o = np.array([[c, -s], [s, c]])
                if reflect:
                    o = o @ np.array([[1.0, 0.0], [0.0, -1.0]])
                best = min(best, np.linalg.norm(o - m))
        assert np.linalg.norm(out - m) <= best + 1e-6

    def test_warns_on_rank_deficient(self):
        with pytest.warns(DegenerateRoundingWarning):
            out = project_orthogonal(np.array([[1.0, 0.0], [0.0, 0.0]]))
        assert np.allclose(out @ out.T, np.eye(2), atol=1e-10)


class TestProjectSimplex:
    def test_interior_point_untouched(self):
        x = np.array([0.2, 0.3, 0.5])
        assert np.allclose(project_simplex(x), x)

    def test_uniform_shift(self):
        # (0.6, 0.6) projects to (0.5, 0.5): subtract the common excess.
        assert np.allclose(project_simplex(np.array([0.6, 0.6])), [0.5, 0.5])

    def test_clipping(self):
        out = project_simplex(np.array([1.4, -0.4]))
        assert np.allclose(out, [1.0, 0.0])

    @pytest.mark.parametrize("seed", range(20))
    def test_feasibility_random(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(rng.integers(1, 30)) * 3.0
        p = project_simplex(x)
        assert abs(p.sum() - 1.0) <= 1e-12
        assert p.min() >= -1e-15

    @pytest.mark.parametrize("seed", range(10))
    def test_projection_optimality(self, seed):
        # Among random feasible points q, none is closer to x than p.
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(6)
        p = project_simplex(x)
        for _ in range(50):
            q = rng.dirichlet(np.ones(6))
            assert np.linalg.norm(p - x) <= np.linalg.norm(q - x) + 1e-12

    def test_rejects_empty_and_non_finite(self):
        with pytest.raises(InvalidInput):
            project_simplex(np.array([]))
        with pytest.raises(InvalidInput):
            project_simplex(np.array([1.0, np.nan]))
