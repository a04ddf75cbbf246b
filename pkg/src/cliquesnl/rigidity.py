"""Patch-system rigidity: quasi-connectivity testing and augmentation.

A configuration is the patch system C_1..C_M (cliques of the measurement
graph) plus the anchor patch C_{M+1} holding every anchor at its known
position.  Uniqueness of a registered solution hinges on how strongly
patches interlock, which is captured by the bipartite correspondence graph
(nodes on one side, patches on the other, edges by membership): the
configuration is quasi-k-connected when every pair of patch vertices is
joined by at least k paths that are disjoint over node vertices.  In the
plane, a uniquely registrable (rigid) configuration must be
quasi-3-connected, so the pipeline tests quasi-(d+1)-connectivity and, on
failure, welds the weakly attached part on with extra cliques.

The path-disjointness count is a max-flow problem once each node vertex is
split into an in/out pair of unit capacity; patch vertices stay
uncapacitated.  Min cuts then consist of node vertices only, and the two
patch-side shores of the cut certify the weakness: the union of patches on
the source shore meets the union on the sink shore in exactly flow-value
nodes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .cliques import CliqueCover, PgdParams, expand_to_maximal, find_clique_pgd, is_clique
from .errors import InternalError, InvalidInput
from .graph import MeasurementGraph, common_neighborhood_graph

STATUS_RIGID = "rigid"
STATUS_STALLED = "stalled"


@dataclass
class Configuration:
    """Patch membership system over a measurement graph.

    patches holds the ordinary patches C_1..C_M as sorted member tuples; the
    anchor patch C_{M+1} is implicit: every anchor id, with local coordinates
    equal to the true anchor positions.  local_coords is filled by patch
    localization (mds.localize_configuration) and maps, per ordinary patch,
    member id -> d-vector.
    """

    patches: list[tuple[int, ...]]
    anchor_ids: tuple[int, ...]
    anchor_positions: dict[int, np.ndarray]
    dim: int
    local_coords: list[dict[int, np.ndarray]] | None = None
    quality: list | None = None

    @property
    def n_patches(self) -> int:
        """Ordinary patch count M (anchor patch excluded)."""
        return len(self.patches)

    def all_memberships(self) -> list[tuple[int, ...]]:
        """Member tuples of C_1..C_M followed by the anchor patch."""
        return self.patches + [tuple(sorted(self.anchor_ids))]

    def degenerate_patches(self, tol: float = 1e-9) -> list[int]:
        """Indices of localized patches whose points do not affinely span R^d."""
        if self.local_coords is None:
            return []
        bad = []
        for idx, coords in enumerate(self.local_coords):
            pts = np.array([coords[v] for v in self.patches[idx]])
            centered = pts - pts.mean(axis=0)
            s = np.linalg.svd(centered, compute_uv=False)
            rank = int((s > tol * max(s[0], 1.0)).sum()) if s.size else 0
            if rank < self.dim:
                bad.append(idx)
        return bad


def build_configuration(cover: CliqueCover, g: MeasurementGraph) -> Configuration:
    """Configuration from a clique cover: cover cliques plus the anchor patch."""
    if not cover.cliques:
        raise InvalidInput("clique cover is empty")
    return Configuration(
        patches=[c.members for c in cover.cliques],
        anchor_ids=tuple(g.anchors()),
        anchor_positions={a: g.anchor_positions[a].copy() for a in g.anchors()},
        dim=g.dim,
    )


@dataclass
class CorrespondenceGraph:
    """Bipartite membership graph: node vertices vs patch vertices.

    Patch indices run 0..M with M the anchor patch.  node_patches maps a
    node id to the sorted tuple of patch indices containing it.
    """

    memberships: list[tuple[int, ...]]
    node_ids: tuple[int, ...] = field(init=False)
    node_patches: dict[int, tuple[int, ...]] = field(init=False)

    def __post_init__(self):
        node_patches: dict[int, list[int]] = {}
        for p, members in enumerate(self.memberships):
            for v in members:
                node_patches.setdefault(v, []).append(p)
        self.node_ids = tuple(sorted(node_patches))
        self.node_patches = {v: tuple(ps) for v, ps in node_patches.items()}

    @property
    def n_patch_vertices(self) -> int:
        return len(self.memberships)

    @property
    def anchor_patch_index(self) -> int:
        return len(self.memberships) - 1


def build_correspondence_graph(cfg: Configuration) -> CorrespondenceGraph:
    return CorrespondenceGraph(memberships=cfg.all_memberships())


@dataclass(frozen=True)
class FlowResult:
    """Outcome of one max-flow run between two patch vertices.

    The source/sink sides partition all vertices of the correspondence
    graph; a node vertex is placed by reachability of its in-copy in the
    final residual network, so the unit-capacity bottleneck vertices land on
    the source side.
    """

    value: int
    source: int
    sink: int
    source_patches: frozenset[int]
    sink_patches: frozenset[int]
    source_nodes: frozenset[int]
    sink_nodes: frozenset[int]


def max_flow_unit_vertex(gamma: CorrespondenceGraph, s: int, t: int) -> FlowResult:
    """Maximum number of node-disjoint paths between patch vertices s and t.

    Each node vertex is split into an in/out arc of capacity one; patch
    vertices are uncapacitated (capacity |V1| + 1 exceeds any possible
    flow).  Augmenting paths are found by BFS (Edmonds-Karp), and the cut
    sides are read off residual reachability afterwards.
    """
    m = gamma.n_patch_vertices
    if not (0 <= s < m and 0 <= t < m) or s == t:
        raise InvalidInput(f"need two distinct patch indices in 0..{m - 1}")

    node_ids = gamma.node_ids
    n1 = len(node_ids)
    node_index = {v: k for k, v in enumerate(node_ids)}
    big = n1 + 1

    # Vertex numbering: patch p -> p; node k: in = m + 2k, out = m + 2k + 1.
    n_verts = m + 2 * n1
    cap: dict[tuple[int, int], int] = {}
    adj: list[list[int]] = [[] for _ in range(n_verts)]

    def add_edge(u, w, c):
        if (u, w) not in cap:
            cap[(u, w)] = 0
            cap[(w, u)] = 0
            adj[u].append(w)
            adj[w].append(u)
        cap[(u, w)] += c

    for k in range(n1):
        add_edge(m + 2 * k, m + 2 * k + 1, 1)
    for p, members in enumerate(gamma.memberships):
        for v in members:
            k = node_index[v]
            add_edge(p, m + 2 * k, big)       # patch -> node_in
            add_edge(m + 2 * k + 1, p, big)   # node_out -> patch

    flow: dict[tuple[int, int], int] = {e: 0 for e in cap}
    value = 0
    while True:
        # BFS for a shortest augmenting path in the residual network.
        parent = {s: None}
        queue = deque([s])
        while queue and t not in parent:
            u = queue.popleft()
            for w in adj[u]:
                if w not in parent and cap[(u, w)] - flow[(u, w)] > 0:
                    parent[w] = u
                    queue.append(w)
        if t not in parent:
            break
        # Residual capacities are big or 1; bottleneck on any s-t path is 1.
        w = t
        while parent[w] is not None:
            u = parent[w]
            flow[(u, w)] += 1
            flow[(w, u)] -= 1
            w = u
        value += 1

    reachable = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in reachable and cap[(u, w)] - flow[(u, w)] > 0:
                reachable.add(w)
                queue.append(w)

    source_patches = frozenset(p for p in range(m) if p in reachable)
    source_nodes = frozenset(
        v for v in node_ids if (m + 2 * node_index[v]) in reachable
    )
    return FlowResult(
        value=value,
        source=s,
        sink=t,
        source_patches=source_patches,
        sink_patches=frozenset(range(m)) - source_patches,
        source_nodes=source_nodes,
        sink_nodes=frozenset(node_ids) - source_nodes,
    )


@dataclass
class QuasiConnectivityResult:
    verdict: bool
    k: int
    min_flow: int
    pairs_checked: int
    witness: FlowResult | None = None


def is_quasi_k_connected(
    gamma: CorrespondenceGraph, k: int, exhaustive: bool = False
) -> QuasiConnectivityResult:
    """Test whether every checked patch pair carries at least k disjoint paths.

    Default schedule anchors one endpoint at the anchor patch and sweeps the
    other over all ordinary patches; with exhaustive=True all unordered
    pairs are checked.  The witness on failure is the first flow found below
    k, and min_flow is the smallest flow seen over the whole schedule.
    """
    if k < 1:
        raise InvalidInput("k must be at least 1")
    m = gamma.n_patch_vertices
    if m < 2:
        raise InvalidInput("need at least two patch vertices")

    if exhaustive:
        pairs = [(s, t) for s in range(m) for t in range(s + 1, m)]
    else:
        hub = gamma.anchor_patch_index
        pairs = [(hub, t) for t in range(m) if t != hub]

    min_flow = None
    witness = None
    for checked, (s, t) in enumerate(pairs, start=1):
        res = max_flow_unit_vertex(gamma, s, t)
        if min_flow is None or res.value < min_flow:
            min_flow = res.value
            if res.value < k and witness is None:
                witness = res
        if witness is not None:
            return QuasiConnectivityResult(
                verdict=False,
                k=k,
                min_flow=min_flow,
                pairs_checked=checked,
                witness=witness,
            )
    return QuasiConnectivityResult(
        verdict=True, k=k, min_flow=min_flow, pairs_checked=len(pairs)
    )


def min_cut_patch_sets(flow: FlowResult, cfg: Configuration):
    """Node unions A, B of the patches on the two shores of a min cut.

    A is the union of members over source-side patches, B over sink-side
    patches; their intersection has exactly flow.value nodes (checked).
    """
    memberships = cfg.all_memberships()
    a: set[int] = set()
    for p in flow.source_patches:
        a.update(memberships[p])
    b: set[int] = set()
    for p in flow.sink_patches:
        b.update(memberships[p])
    if len(a & b) != flow.value:
        raise InternalError(
            f"cut size {len(a & b)} does not match flow value {flow.value}"
        )
    return a, b


@dataclass(frozen=True)
class AugmentationStep:
    pair: tuple[int, int]
    clique: tuple[int, ...]


@dataclass
class AugmentationResult:
    configuration: Configuration
    status: str                      # STATUS_RIGID or STATUS_STALLED
    steps: list[AugmentationStep]
    quasi: QuasiConnectivityResult


def augment_configuration(
    cfg: Configuration,
    g: MeasurementGraph,
    exhaustive: bool = False,
    params: PgdParams | None = None,
    max_rounds: int | None = None,
) -> AugmentationResult:
    """Append cliques until the configuration tests quasi-(d+1)-connected.

    On a failed test, take the min-cut shores A, B and scan node pairs
    (i, j) in (A minus B) x (B minus A) in ascending order; the first pair
    whose common neighborhood contains a maximal clique of d+1 or more
    vertices (holding both i and j) contributes that clique as a new patch,
    and the test reruns.  If no pair yields a large enough clique the
    process stalls and the configuration is returned as-is with status
    stalled.
    """
    k = g.dim + 1
    patches = list(cfg.patches)
    existing = set(patches)
    steps: list[AugmentationStep] = []
    if max_rounds is None:
        max_rounds = 10 * (len(patches) + 1) + 100

    for _ in range(max_rounds):
        work = Configuration(
            patches=patches,
            anchor_ids=cfg.anchor_ids,
            anchor_positions=cfg.anchor_positions,
            dim=cfg.dim,
        )
        gamma = build_correspondence_graph(work)
        quasi = is_quasi_k_connected(gamma, k, exhaustive=exhaustive)
        if quasi.verdict:
            return AugmentationResult(work, STATUS_RIGID, steps, quasi)

        a, b = min_cut_patch_sets(quasi.witness, work)
        appended = False
        for i in sorted(a - b):
            if appended:
                break
            for j in sorted(b - a):
                if not g.has_edge(i, j):
                    continue
                sub = common_neighborhood_graph(g, i, j)
                found = find_clique_pgd(sub, params, source_vertex=i)
                # Everything in the common neighborhood subgraph is adjacent
                # to both i and j, so welding them onto the found clique is
                # always legal once (i, j) itself is an edge.
                members = sorted(set(found.members) | {i, j})
                if not is_clique(members, g.adjacency):
                    raise InternalError(
                        f"common-neighborhood clique around ({i}, {j}) failed "
                        "the edge check"
                    )
                new = expand_to_maximal(members, g)
                if len(new) < k:
                    continue
                if new in existing:
                    raise InternalError(
                        "augmentation re-derived an existing patch; "
                        "min-cut shores are inconsistent"
                    )
                patches = patches + [new]
                existing.add(new)
                steps.append(AugmentationStep(pair=(i, j), clique=new))
                appended = True
                break
        if not appended:
            return AugmentationResult(work, STATUS_STALLED, steps, quasi)

    # Safety valve; membership growth is finite so this should not trigger.
    work = Configuration(
        patches=patches,
        anchor_ids=cfg.anchor_ids,
        anchor_positions=cfg.anchor_positions,
        dim=cfg.dim,
    )
    gamma = build_correspondence_graph(work)
    quasi = is_quasi_k_connected(gamma, k, exhaustive=exhaustive)
    status = STATUS_RIGID if quasi.verdict else STATUS_STALLED
    return AugmentationResult(work, status, steps, quasi)
