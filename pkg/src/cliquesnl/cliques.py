"""Maximal-clique extraction and one-clique-per-vertex covers.

A clique of the measurement graph is a patch candidate: its pairwise
distances are all measured, so it can be embedded on its own.  Cliques are
found by maximizing the regularized Lagrangian x^T (A + I/2) x over the
probability simplex with projected gradient ascent; strict local maximizers
of that objective are characteristic vectors of maximal cliques, so the
support of the converged iterate is (after cleanup) a clique.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalError, InvalidInput
from .graph import InducedSubgraph, MeasurementGraph
from .numerics import project_simplex


@dataclass(frozen=True)
class PgdParams:
    """Projected gradient ascent controls.

    step None means the safe default 1 / (2 ||A + I/2||_inf) computed per
    subgraph.  tol doubles as the support threshold when rounding the
    converged iterate to a vertex set.
    """

    step: float | None = None
    max_iter: int = 500
    tol: float = 1e-4


@dataclass(frozen=True)
class Clique:
    """A verified clique, members sorted ascending."""

    members: tuple[int, ...]
    source_vertex: int

    def __post_init__(self):
        if len(self.members) < 1:
            raise InvalidInput("clique needs at least one member")
        if tuple(sorted(set(self.members))) != self.members:
            raise InvalidInput("members must be sorted and distinct")

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class CliqueCover:
    """One maximal clique per processed vertex, redundancies removed.

    undersized lists indices of cliques smaller than d+1 (kept, but they
    cannot pin down a d-dimensional patch on their own).  uncoverable lists
    isolated vertices, which admit no clique of two or more members.
    """

    cliques: list[Clique]
    covered: frozenset[int]
    undersized: tuple[int, ...]
    uncoverable: tuple[int, ...]

    @property
    def n_cliques(self) -> int:
        return len(self.cliques)


def is_clique(members, adj) -> bool:
    """All-pairs adjacency check against an adjacency map."""
    members = list(members)
    for a in range(len(members)):
        for b in range(a + 1, len(members)):
            if members[b] not in adj[members[a]]:
                return False
    return True


def find_clique_pgd(
    sub: InducedSubgraph,
    params: PgdParams | None = None,
    source_vertex: int | None = None,
) -> Clique:
    """Find a large clique of an induced subgraph by simplex ascent.

    Starts at the barycenter with the source vertex's weight doubled (then
    renormalized), ascends x^T (A + I/2) x under simplex projection, and
    rounds the support {v : x_v > tol} down to a clique by discarding the
    smallest-weight member until the all-pairs check passes.  Worst case the
    result degenerates to a single edge or a single vertex.
    """
    params = params or PgdParams()
    nodes = sub.nodes
    n = sub.n_nodes
    if n == 0:
        raise InvalidInput("empty subgraph")
    if source_vertex is None:
        source_vertex = nodes[0]
    if source_vertex not in sub.adj:
        raise InvalidInput(f"source vertex {source_vertex} not in subgraph")
    if n == 1:
        return Clique(members=(nodes[0],), source_vertex=source_vertex)

    index = {v: k for k, v in enumerate(nodes)}
    a = sub.adjacency_matrix()
    # ||A + I/2||_inf = max row sum = max degree + 1/2.
    if params.step is None:
        step = 1.0 / (2.0 * (a.sum(axis=1).max() + 0.5))
    else:
        step = params.step

    x = np.full(n, 1.0 / n)
    x[index[source_vertex]] *= 2.0
    x /= x.sum()

    for _ in range(params.max_iter):
        # gradient of x^T (A + I/2) x is 2 A x + x
        x_next = project_simplex(x + step * (2.0 * a @ x + x))
        if np.abs(x_next - x).sum() <= 1e-14:
            x = x_next
            break
        x = x_next

    support = [v for v in nodes if x[index[v]] > params.tol]
    if not support:
        support = [source_vertex]
    support.sort(key=lambda v: x[index[v]])  # ascending weight: drop front first
    while len(support) > 1 and not is_clique(support, sub.adj):
        support.pop(0)
    return Clique(members=tuple(sorted(support)), source_vertex=source_vertex)


def expand_to_maximal(members, g: MeasurementGraph) -> tuple[int, ...]:
    """Greedily grow a clique until no vertex is adjacent to every member.

    Candidates are scanned in ascending id order, so the result is
    deterministic.  Returns the member tuple sorted ascending.
    """
    members = list(members)
    if not members:
        raise InvalidInput("cannot expand an empty clique")
    if not is_clique(members, g.adjacency):
        raise InvalidInput("input vertex set is not a clique")
    candidates = set(g.adjacency[members[0]])
    for v in members[1:]:
        candidates &= g.adjacency[v]
    candidates -= set(members)
    while candidates:
        u = min(candidates)
        members.append(u)
        candidates &= g.adjacency[u]
        candidates.discard(u)
    return tuple(sorted(members))


def build_clique_cover(
    g: MeasurementGraph, params: PgdParams | None = None
) -> CliqueCover:
    """Extract one maximal clique per vertex, skipping vertices already
    absorbed by a clique of size at least d+1.

    Vertices are processed in ascending id order.  Each kept clique is
    verified by the explicit all-pairs edge check; duplicates (a maximal
    clique re-found from another seed) are discarded.  Isolated vertices are
    reported as uncoverable rather than wrapped in one-vertex cliques.
    """
    from .graph import neighborhood_graph

    params = params or PgdParams()
    min_useful = g.dim + 1
    cliques: list[Clique] = []
    seen: set[tuple[int, ...]] = set()
    absorbed: set[int] = set()
    covered: set[int] = set()
    undersized: list[int] = []
    uncoverable: list[int] = []

    for i in g.nodes():
        if i in absorbed:
            continue
        if not g.adjacency[i]:
            uncoverable.append(i)
            continue
        sub = neighborhood_graph(g, i)
        found = find_clique_pgd(sub, params, source_vertex=i)
        members = found.members
        if i not in members:
            # Everything in the neighborhood subgraph is adjacent to i.
            members = tuple(sorted(members + (i,)))
        members = expand_to_maximal(members, g)
        if not is_clique(members, g.adjacency):
            raise InternalError(f"extraction around {i} produced a non-clique")
        if members in seen:
            continue
        seen.add(members)
        cliques.append(Clique(members=members, source_vertex=i))
        covered.update(members)
        if len(members) >= min_useful:
            absorbed.update(members)
        else:
            undersized.append(len(cliques) - 1)

    return CliqueCover(
        cliques=cliques,
        covered=frozenset(covered),
        undersized=tuple(undersized),
        uncoverable=tuple(uncoverable),
    )
