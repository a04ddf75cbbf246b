"""Strain (squared-distance stress) objective and monotone descent.

The refinement objective over a set of measured edges is

    sum_edges ( ||x_i - x_j||^2 - d_ij^2 )^2

which is smooth in the positions, so plain gradient descent with Armijo
backtracking suffices.  Fixed points (anchors) are masked out of the
gradient.  Descent is strictly monotone: only improving steps are accepted,
and the loop stops when the free-gradient norm drops below gtol, the step
size underflows, or max_iter is reached.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, InvalidInput

_ARMIJO_C = 1e-4
_STEP_SHRINK = 0.5
_STEP_GROW = 2.0
_MIN_STEP = 1e-18


def strain_value(points: np.ndarray, edges: np.ndarray, d_sq: np.ndarray) -> float:
    """Objective value; points (n, d), edges (m, 2) int, d_sq (m,) squared targets."""
    diff = points[edges[:, 0]] - points[edges[:, 1]]
    gap = (diff**2).sum(axis=1) - d_sq
    return float((gap**2).sum())


def strain_gradient(
    points: np.ndarray,
    edges: np.ndarray,
    d_sq: np.ndarray,
    free_mask: np.ndarray,
) -> np.ndarray:
    """Analytic gradient, zeroed on fixed rows.

    d/dx_i = sum_j 4 (||x_i - x_j||^2 - d_ij^2)(x_i - x_j) over incident edges.
    """
    diff = points[edges[:, 0]] - points[edges[:, 1]]
    gap = (diff**2).sum(axis=1) - d_sq
    contrib = 4.0 * gap[:, None] * diff
    grad = np.zeros_like(points)
    np.add.at(grad, edges[:, 0], contrib)
    np.add.at(grad, edges[:, 1], -contrib)
    grad[~free_mask] = 0.0
    return grad


def descend(
    points: np.ndarray,
    edges: np.ndarray,
    d_sq: np.ndarray,
    free_mask: np.ndarray,
    gtol: float = 1e-10,
    max_iter: int = 200,
):
    """Armijo-backtracking gradient descent on the strain objective.

    Returns (refined points, iterations used, final objective).  The
    objective sequence is non-increasing by construction.
    """
    points = np.array(points, dtype=float)
    edges = np.asarray(edges, dtype=int)
    d_sq = np.asarray(d_sq, dtype=float)
    free_mask = np.asarray(free_mask, dtype=bool)
    if edges.ndim != 2 or edges.shape[1] != 2:
        raise DimensionMismatch(f"edges must be (m, 2), got {edges.shape}")
    if d_sq.shape[0] != edges.shape[0]:
        raise DimensionMismatch("one squared target per edge required")
    if free_mask.shape[0] != points.shape[0]:
        raise DimensionMismatch("one free flag per point required")
    if np.any(d_sq < 0):
        raise InvalidInput("squared distance targets must be non-negative")
    if edges.shape[0] == 0 or not free_mask.any():
        return points, 0, strain_value(points, edges, d_sq)

    value = strain_value(points, edges, d_sq)
    step = 1.0
    iters = 0
    for iters in range(1, max_iter + 1):
        grad = strain_gradient(points, edges, d_sq, free_mask)
        grad_norm_sq = float((grad**2).sum())
        if np.sqrt(grad_norm_sq) <= gtol:
            iters -= 1
            break
        # Backtrack from a step that grows after each accepted iteration, so
        # well-scaled problems do not crawl.
        step *= _STEP_GROW
        while True:
            candidate = points - step * grad
            cand_value = strain_value(candidate, edges, d_sq)
            if cand_value <= value - _ARMIJO_C * step * grad_norm_sq:
                points = candidate
                value = cand_value
                break
            step *= _STEP_SHRINK
            if step < _MIN_STEP:
                return points, iters, value
    return points, iters, value
