"""Independent brute-force oracles used to freeze expected test values.

Everything here is deliberately naive: exhaustive enumeration and dense
grid search, no shared code with the package's algorithms.
"""

from __future__ import annotations

import itertools

import numpy as np


def brute_force_max_clique(nodes, adj) -> tuple[int, ...]:
    """Largest clique by subset enumeration (first in lexicographic order
    among maximum-size cliques).  Only viable for small graphs."""
    nodes = sorted(nodes)
    best: tuple[int, ...] = ()
    for size in range(len(nodes), 0, -1):
        for combo in itertools.combinations(nodes, size):
            ok = all(
                combo[b] in adj[combo[a]]
                for a in range(size)
                for b in range(a + 1, size)
            )
            if ok:
                return combo
        if best:
            break
    return best


def brute_force_disjoint_paths(memberships, s: int, t: int) -> int:
    """Maximum number of paths between patch vertices s and t that are
    pairwise disjoint over node vertices, by exhaustive search.

    memberships[p] is the node set of patch p.  A path alternates
    patch-node-patch-...; only its node vertices matter, so paths are
    enumerated as sequences of distinct nodes where consecutive nodes share
    a patch, the first node lies in patch s, and the last lies in patch t.
    Patch vertices (including s and t) may be revisited freely.
    """
    memberships = [frozenset(m) for m in memberships]
    node_ids = sorted(set().union(*memberships)) if memberships else []

    def node_patches(v):
        return {p for p, members in enumerate(memberships) if v in members}

    adjacent = {
        v: {
            w
            for w in node_ids
            if w != v and node_patches(v) & node_patches(w)
        }
        for v in node_ids
    }
    starts = {v for v in node_ids if v in memberships[s]}
    ends = {v for v in node_ids if v in memberships[t]}

    def minimal_paths(available):
        """Node sequences of s-t paths within available, pruned to minimal
        ones: a path stops at its first end node, and only its first node may
        be a start node (any other path shortens to one of these, and
        shorter paths only help a packing)."""
        found = []

        def extend(seq):
            if seq[-1] in ends:
                found.append(frozenset(seq))
                return
            for w in sorted(adjacent[seq[-1]] & available - set(seq)):
                if w in starts:
                    continue
                seq.append(w)
                extend(seq)
                seq.pop()

        for v in sorted(starts & available):
            extend([v])
        return found

    memo: dict[frozenset, int] = {}

    def best_packing(available: frozenset) -> int:
        if available in memo:
            return memo[available]
        best = 0
        for path in minimal_paths(set(available)):
            best = max(best, 1 + best_packing(available - path))
        memo[available] = best
        return best

    return best_packing(frozenset(node_ids))


def grid_polish_rigid_align(points, targets, coarse: int = 720):
    """Best rigid alignment of 2-d points onto targets by rotation-angle
    grid search (both orientation classes) plus golden-section polish.

    For a fixed rotation O the optimal translation is the centroid gap,
    from plain least squares.  Returns the minimal residual sum of squares.
    """
    points = np.asarray(points, dtype=float)
    targets = np.asarray(targets, dtype=float)

    def residual(theta, reflect):
        c, s = np.cos(theta), np.sin(theta)
        o = np.array([[c, -s], [s, c]])
        if reflect:
            o = o @ np.array([[1.0, 0.0], [0.0, -1.0]])
        moved = points @ o.T
        t = targets.mean(axis=0) - moved.mean(axis=0)
        return float(((moved + t - targets) ** 2).sum())

    best = np.inf
    for reflect in (False, True):
        thetas = np.linspace(0.0, 2 * np.pi, coarse, endpoint=False)
        values = [residual(th, reflect) for th in thetas]
        k = int(np.argmin(values))
        lo = thetas[k] - 2 * np.pi / coarse
        hi = thetas[k] + 2 * np.pi / coarse
        # Golden-section refinement on the best bracket.
        phi = (np.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        c1 = b - phi * (b - a)
        c2 = a + phi * (b - a)
        f1, f2 = residual(c1, reflect), residual(c2, reflect)
        for _ in range(200):
            if f1 < f2:
                b, c2, f2 = c2, c1, f1
                c1 = b - phi * (b - a)
                f1 = residual(c1, reflect)
            else:
                a, c1, f1 = c1, c2, f2
                c2 = a + phi * (b - a)
                f2 = residual(c2, reflect)
        best = min(best, f1, f2)
    return best


def orthogonal_pair_bruteforce(c_mat, d: int = 2, coarse: int = 180):
    """Minimize Trace(C O^T O) over per-block orthogonal matrices, last block
    pinned to the identity, by angle/orientation grid search with polish.

    Works for two free blocks (three total); the search space is
    (theta_1, reflect_1, theta_2, reflect_2).
    """
    c_mat = np.asarray(c_mat, dtype=float)
    n_blocks = c_mat.shape[0] // d
    assert n_blocks == 3 and d == 2, "oracle written for two free 2-d blocks"

    def rot(theta, reflect):
        c, s = np.cos(theta), np.sin(theta)
        o = np.array([[c, -s], [s, c]])
        if reflect:
            o = o @ np.array([[1.0, 0.0], [0.0, -1.0]])
        return o

    def objective(t1, r1, t2, r2):
        o = np.hstack([rot(t1, r1), rot(t2, r2), np.eye(2)])
        return float(np.trace(c_mat @ (o.T @ o)))

    thetas = np.linspace(0.0, 2 * np.pi, coarse, endpoint=False)
    best = (np.inf, None)
    for r1 in (False, True):
        for r2 in (False, True):
            grid = np.array(
                [[objective(t1, r1, t2, r2) for t2 in thetas] for t1 in thetas]
            )
            k1, k2 = np.unravel_index(np.argmin(grid), grid.shape)
            best_here = (grid[k1, k2], (thetas[k1], r1, thetas[k2], r2))
            if best_here[0] < best[0]:
                best = best_here

    # Coordinate-descent polish around the best grid point.
    value, (t1, r1, t2, r2) = best
    step = 2 * np.pi / coarse
    for _ in range(60):
        improved = False
        for dt1 in (-step, 0.0, step):
            for dt2 in (-step, 0.0, step):
                v = objective(t1 + dt1, r1, t2 + dt2, r2)
                if v < value - 1e-15:
                    value, t1, t2 = v, t1 + dt1, t2 + dt2
                    improved = True
        if not improved:
            step /= 2.0
            if step < 1e-12:
                break
    return value


def central_difference_gradient(fn, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient of a scalar function of an array."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        xp = x.copy()
        xp[idx] += h
        xm = x.copy()
        xm[idx] -= h
        grad[idx] = (fn(xp) - fn(xm)) / (2.0 * h)
        it.iternext()
    return grad
