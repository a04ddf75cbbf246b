"""Accuracy metrics for localization output."""

from __future__ import annotations

import numpy as np

from .errors import InvalidInput
from .mds import procrustes_align


def ane(estimated: dict[int, np.ndarray], truth: dict[int, np.ndarray]) -> float:
    """Average normalized error between estimated and true sensor positions.

    The estimate is first aligned onto the truth by the optimal rigid
    transform (reflections allowed); the reported value is

        sqrt( sum ||x_hat_i - x_i||^2 / sum ||x_i - c||^2 )

    with c the centroid of the true positions.  Zero for a perfect
    reconstruction, invariant to any rigid motion of the estimate.
    """
    if set(estimated) != set(truth):
        raise InvalidInput("estimated and true position maps must share ids")
    ids = sorted(truth)
    if len(ids) < 2:
        raise InvalidInput("need at least two points for a meaningful error")
    est = np.array([estimated[v] for v in ids], dtype=float)
    ref = np.array([truth[v] for v in ids], dtype=float)
    if not np.all(np.isfinite(est)):
        raise InvalidInput("estimated positions contain non-finite entries")

    aligned = procrustes_align(est, ref).apply(est)
    num = float(((aligned - ref) ** 2).sum())
    centered = ref - ref.mean(axis=0)
    den = float((centered**2).sum())
    if den == 0.0:
        raise InvalidInput("true positions are all identical")
    return float(np.sqrt(num / den))
