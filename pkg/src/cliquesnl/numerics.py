"""Small dense matrix kernels used throughout the pipeline.

Everything here operates on modest sizes (patch-count blocks, d x d blocks
with d in {2, 3}), so plain LAPACK via numpy is the right tool.  The helpers
add the conventions the rest of the package relies on: eigenvalues sorted in
descending order, exact symmetry of projected matrices, and explicit input
validation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRoundingWarning, DimensionMismatch, InvalidInput

# Minimum singular value, relative to the largest, below which a matrix is
# reported as rank-deficient when projecting onto the orthogonal group.
_RANK_TOL = 1e-12


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs of a symmetric matrix, eigenvalues descending."""

    values: np.ndarray   # shape (n,)
    vectors: np.ndarray  # shape (n, n), column i pairs with values[i]


@dataclass(frozen=True)
class SmallSvd:
    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray  # right factor, columns are right singular vectors

    def reconstruct(self) -> np.ndarray:
        full = np.zeros((self.u.shape[1], self.v.shape[1]))
        k = self.sigma.shape[0]
        full[:k, :k] = np.diag(self.sigma)
        return self.u @ full @ self.v.T


def _as_square(a, name):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput(f"{name} contains non-finite entries")
    return a


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Return (a + a.T) / 2, which is exactly symmetric in floating point."""
    return (a + a.T) / 2.0


def sym_eig(s) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix with descending eigenvalues.

    The input is symmetrized before factorization, so mild floating-point
    asymmetry is tolerated.
    """
    s = symmetrize(_as_square(s, "s"))
    values, vectors = np.linalg.eigh(s)
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(values[order], vectors[:, order])


def svd_small(m) -> SmallSvd:
    """Full SVD of a small dense matrix, singular values descending."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise DimensionMismatch(f"m must be 2-d, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInput("m contains non-finite entries")
    u, sigma, vt = np.linalg.svd(m, full_matrices=True)
    return SmallSvd(u, sigma, vt.T)


def project_psd(s) -> np.ndarray:
    """Frobenius-nearest positive semidefinite matrix: clip eigenvalues at zero."""
    dec = sym_eig(s)
    clipped = np.maximum(dec.values, 0.0)
    return symmetrize((dec.vectors * clipped) @ dec.vectors.T)


def project_block_identity(s, d: int) -> np.ndarray:
    """Overwrite every d x d diagonal block with the identity.

    This is the Euclidean projection onto the affine set of symmetric matrices
    whose d x d diagonal blocks are all I_d; off-diagonal blocks pass through.
    """
    s = _as_square(s, "s")
    n = s.shape[0]
    if d < 1 or n % d != 0:
        raise DimensionMismatch(f"order {n} is not a multiple of block size {d}")
    out = s.copy()
    eye = np.eye(d)
    for i in range(0, n, d):
        out[i:i + d, i:i + d] = eye
    return out


def project_orthogonal(m) -> np.ndarray:
    """Nearest orthogonal matrix in Frobenius norm: U V^T from the SVD of m.

    Reflections are permitted (no determinant correction).  A numerically
    rank-deficient input has no unique nearest orthogonal matrix; the U V^T
    choice is still returned but a DegenerateRoundingWarning is emitted.
    """
    m = _as_square(m, "m")
    dec = svd_small(m)
    if dec.sigma[0] == 0.0 or dec.sigma[-1] < _RANK_TOL * max(dec.sigma[0], 1.0):
        warnings.warn(
            "orthogonal projection of a rank-deficient matrix is not unique",
            DegenerateRoundingWarning,
            stacklevel=2,
        )
    return dec.u @ dec.v.T


def project_simplex(x) -> np.ndarray:
    """Euclidean projection onto the probability simplex {x >= 0, sum x = 1}.

    Sort-based algorithm: find the largest k with sorted[k] > (cumsum[k]-1)/k,
    then shift and clip.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise InvalidInput(f"x must be a non-empty vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInput("x contains non-finite entries")
    a = -np.sort(-x)
    lambdas = (np.cumsum(a) - 1.0) / np.arange(1, x.size + 1)
    for k in range(x.size - 1, -1, -1):
        if a[k] > lambdas[k]:
            return np.maximum(x - lambdas[k], 0.0)
    # Unreachable for finite input: k = 0 always satisfies a[0] > a[0] - 1.
    return np.maximum(x - lambdas[0], 0.0)
