"""Per-patch localization: classical MDS, anchor alignment, stress refinement.

Every patch is a clique, so all pairwise distances inside it are measured
and classical multidimensional scaling applies directly: double-center the
squared distances, take the top-d eigenpairs, and read coordinates off the
scaled eigenvectors.  With exact distances from a d-dimensional point set
the centered Gram matrix is positive semidefinite of rank at most d and the
embedding is exact up to a rigid transform; noise shows up as negative
eigenvalue mass, which is recorded as a quality diagnostic rather than
silently discarded.

Patches containing anchors are then carried into the global frame as far as
the anchors allow: two or more anchors give a full orthogonal Procrustes
alignment, a single anchor gives a translation, and in every case the
anchor members are finally placed exactly at their known positions.  A
strain descent over the clique's measured distances (anchors held fixed)
polishes the result under noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import strain
from .errors import DimensionMismatch, InternalError, InvalidInput
from .graph import MeasurementGraph
from .numerics import svd_small, sym_eig
from .rigidity import Configuration

# Relative eigenvalue threshold for the numerical rank of the centered Gram
# matrix ("how d-dimensional did this patch look").
_RANK_TOL = 1e-12

_PATCH_REFINE_MAX_ITER = 200
_REFINE_GTOL = 1e-10


@dataclass(frozen=True)
class PatchQuality:
    """Embedding diagnostics: Gram rank used and negative eigenvalue mass.

    neg_eigen_mass is sum |negative eigenvalues| / sum |all eigenvalues| of
    the centered Gram matrix; zero for exact d-dimensional data.
    """

    rank_used: int
    neg_eigen_mass: float


@dataclass
class Patch:
    """A localized patch: member ids with local coordinates."""

    members: tuple[int, ...]
    coords: dict[int, np.ndarray]
    quality: PatchQuality
    anchors: tuple[int, ...]


@dataclass(frozen=True)
class RigidTransform:
    """x -> rotation @ x + translation; rotation may include a reflection."""

    rotation: np.ndarray
    translation: np.ndarray

    def apply(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return points @ self.rotation.T + self.translation

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self after other: (self . other)(x) = self(other(x))."""
        return RigidTransform(
            rotation=self.rotation @ other.rotation,
            translation=self.rotation @ other.translation + self.translation,
        )


def cmds(dist: np.ndarray, d: int):
    """Classical MDS embedding of a full distance matrix into R^d.

    Returns (coords, PatchQuality) with coords of shape (n, d).  Negative
    eigenvalues of the centered Gram matrix are clipped to zero before the
    square root; their relative mass is reported in the quality record.
    """
    dist = np.asarray(dist, dtype=float)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise DimensionMismatch(f"dist must be square, got {dist.shape}")
    n = dist.shape[0]
    if n < 1:
        raise InvalidInput("need at least one point")
    if not np.all(np.isfinite(dist)) or np.any(dist < 0):
        raise InvalidInput("distances must be finite and non-negative")
    if d < 1:
        raise InvalidInput("embedding dimension must be positive")

    sq = (dist**2 + dist.T**2) / 2.0  # tolerate mild asymmetry
    np.fill_diagonal(sq, 0.0)
    # Double centering: B = -1/2 (I - uu^T/n) D2 (I - uu^T/n).
    row_mean = sq.mean(axis=1, keepdims=True)
    col_mean = sq.mean(axis=0, keepdims=True)
    b = -0.5 * (sq - row_mean - col_mean + sq.mean())

    dec = sym_eig(b)
    abs_sum = float(np.abs(dec.values).sum())
    neg_mass = float(np.abs(dec.values[dec.values < 0]).sum()) / abs_sum if abs_sum else 0.0
    top = dec.values[0] if n else 0.0
    rank = int((dec.values > _RANK_TOL * max(top, 1.0)).sum())

    lead = np.maximum(dec.values[:d], 0.0)
    coords = dec.vectors[:, :d] * np.sqrt(lead)
    if coords.shape[1] < d:  # fewer points than dimensions: pad with zeros
        coords = np.hstack([coords, np.zeros((n, d - coords.shape[1]))])
    return coords, PatchQuality(rank_used=rank, neg_eigen_mass=neg_mass)


def procrustes_align(points: np.ndarray, targets: np.ndarray) -> RigidTransform:
    """Least-squares rigid alignment of points onto targets.

    Minimizes sum ||O x_i + t - y_i||^2 over orthogonal O (reflections
    allowed) and translations t.  Closed form: with centered covariance
    C = sum (x_i - mu)(y_i - nu)^T = U S V^T, the optimum is O = V U^T and
    t = nu - O mu.  A single pair reduces to a pure translation.
    """
    points = np.asarray(points, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if points.shape != targets.shape or points.ndim != 2:
        raise DimensionMismatch(
            f"point sets must share shape, got {points.shape} vs {targets.shape}"
        )
    if points.shape[0] < 1:
        raise InvalidInput("need at least one pair")
    d = points.shape[1]
    if points.shape[0] == 1:
        return RigidTransform(rotation=np.eye(d), translation=targets[0] - points[0])

    mu = points.mean(axis=0)
    nu = targets.mean(axis=0)
    cov = (points - mu).T @ (targets - nu)
    dec = svd_small(cov)
    rotation = dec.v @ dec.u.T
    return RigidTransform(rotation=rotation, translation=nu - rotation @ mu)


def refine_patch_stress(
    coords: dict[int, np.ndarray],
    dists: dict[tuple[int, int], float],
    fixed_ids,
    max_iter: int = _PATCH_REFINE_MAX_ITER,
):
    """Strain descent over the given pairwise distances, fixed ids pinned.

    coords maps member id -> position; dists maps (i, j) pairs (any
    orientation) to measured distances.  Returns a new coords dict.
    """
    ids = sorted(coords)
    index = {v: k for k, v in enumerate(ids)}
    points = np.array([coords[v] for v in ids])
    edges = []
    d_sq = []
    for (i, j), dist in dists.items():
        if i in index and j in index:
            edges.append((index[i], index[j]))
            d_sq.append(dist**2)
    if not edges:
        return {v: coords[v].copy() for v in ids}
    free = np.ones(len(ids), dtype=bool)
    for v in fixed_ids:
        if v in index:
            free[index[v]] = False
    refined, _, _ = strain.descend(
        points,
        np.array(edges),
        np.array(d_sq),
        free,
        gtol=_REFINE_GTOL,
        max_iter=max_iter,
    )
    return {v: refined[index[v]].copy() for v in ids}


def localize_patch(members, g: MeasurementGraph, refine: bool = True) -> Patch:
    """Embed one clique and pull it toward the global frame via its anchors.

    members must be a clique of g, so every pairwise distance is available:
    measured for pairs with at least one sensor, computed from the known
    positions for anchor pairs (those are exact side information, never
    edges).  The anchor members end up exactly at their known positions;
    sensor members carry the aligned (and optionally strain-refined)
    embedding.
    """
    members = tuple(sorted(members))
    n = len(members)
    d = g.dim
    dist = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            u, v = members[a], members[b]
            if g.is_anchor(u) and g.is_anchor(v):
                d_uv = float(
                    np.linalg.norm(g.anchor_positions[u] - g.anchor_positions[v])
                )
            elif g.has_edge(u, v):
                d_uv = g.distance(u, v)
            else:
                raise InternalError(
                    f"patch {members} is not a clique: missing edge ({u}, {v})"
                )
            dist[a, b] = dist[b, a] = d_uv

    coords, quality = cmds(dist, d)
    anchors = tuple(v for v in members if g.is_anchor(v))

    if anchors:
        anchor_rows = np.array([members.index(a) for a in anchors])
        recon = coords[anchor_rows]
        known = np.array([g.anchor_positions[a] for a in anchors])
        transform = procrustes_align(recon, known)
        coords = transform.apply(coords)

    coord_map = {v: coords[k].copy() for k, v in enumerate(members)}
    for a in anchors:
        coord_map[a] = g.anchor_positions[a].copy()

    if refine:
        pair_dists = {
            (members[a], members[b]): dist[a, b]
            for a in range(n)
            for b in range(a + 1, n)
        }
        coord_map = refine_patch_stress(coord_map, pair_dists, anchors)
        for a in anchors:
            coord_map[a] = g.anchor_positions[a].copy()

    return Patch(members=members, coords=coord_map, quality=quality, anchors=anchors)


def localize_configuration(
    cfg: Configuration, g: MeasurementGraph, refine: bool = True
) -> Configuration:
    """Localize every ordinary patch of a configuration (independently; the
    patches share no state, so this is trivially parallelizable)."""
    coords = []
    quality = []
    for members in cfg.patches:
        patch = localize_patch(members, g, refine=refine)
        coords.append(patch.coords)
        quality.append(patch.quality)
    return Configuration(
        patches=list(cfg.patches),
        anchor_ids=cfg.anchor_ids,
        anchor_positions=cfg.anchor_positions,
        dim=cfg.dim,
        local_coords=coords,
        quality=quality,
    )
