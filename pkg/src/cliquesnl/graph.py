"""Range measurement graphs: generation, noise, induced subgraphs, file I/O.

Node ids are 1-based: sensors are 1..N, anchors are N+1..N+K.  Anchor
positions are exact side information; anchor-anchor pairs carry no
information and are never edges.  A graph, once constructed, is treated as
immutable and may be shared freely.

Randomness
----------
All sampling uses numpy's PCG64 generator.  A user seed is split into
independent streams by keying the seed sequence with a stream id:
``SeedSequence((seed, 0))`` drives position sampling in ``generate_rgg`` and
``SeedSequence((seed, 1))`` drives measurement noise in ``apply_noise``.
Same seed, same platform: identical output, bit for bit.

File format
-----------
A graph file is line-oriented text::

    snl-graph v1 d=<d> N=<n_sensors> K=<n_anchors> r=<radio_range>
    anchor <id> <x> <y> [<z>]
    edge <i> <j> <dist>
    truth <id> <x> <y> [<z>]

``truth`` lines are optional.  Duplicate ``edge`` lines for the same pair,
in either orientation, are averaged at ingest.  Blank lines and lines
starting with ``#`` are ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, ParseError

_POSITION_STREAM = 0
_NOISE_STREAM = 1


def _stream_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((int(seed), stream)))


def edge_key(i: int, j: int) -> tuple[int, int]:
    """Canonical (min, max) key for an undirected edge."""
    return (i, j) if i < j else (j, i)


@dataclass
class MeasurementGraph:
    """Undirected range-measurement graph over sensors and anchors.

    distances maps canonical (i, j) pairs, i < j, to measured distances.
    ground_truth, when present, maps node ids to true positions and covers
    every node.  anchor_positions always covers every anchor.
    """

    n_sensors: int
    n_anchors: int
    radio_range: float
    dim: int
    distances: dict[tuple[int, int], float]
    anchor_positions: dict[int, np.ndarray]
    ground_truth: dict[int, np.ndarray] | None = None
    adjacency: dict[int, set[int]] = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_sensors < 1:
            raise InvalidInput("need at least one sensor")
        if self.n_anchors < 1:
            raise InvalidInput("need at least one anchor")
        if self.radio_range <= 0:
            raise InvalidInput("radio_range must be positive")
        if self.dim not in (2, 3):
            raise InvalidInput(f"dim must be 2 or 3, got {self.dim}")
        adj: dict[int, set[int]] = {v: set() for v in self.nodes()}
        for (i, j) in self.distances:
            if not (1 <= i < j <= self.n_nodes):
                raise InvalidInput(f"edge ({i}, {j}) out of range")
            if i > self.n_sensors and j > self.n_sensors:
                raise InvalidInput(f"anchor-anchor edge ({i}, {j}) not allowed")
            adj[i].add(j)
            adj[j].add(i)
        self.adjacency = adj

    @property
    def n_nodes(self) -> int:
        return self.n_sensors + self.n_anchors

    def nodes(self) -> range:
        return range(1, self.n_nodes + 1)

    def sensors(self) -> range:
        return range(1, self.n_sensors + 1)

    def anchors(self) -> range:
        return range(self.n_sensors + 1, self.n_nodes + 1)

    def is_anchor(self, v: int) -> bool:
        return v > self.n_sensors

    def neighbors(self, v: int) -> set[int]:
        return self.adjacency[v]

    def has_edge(self, i: int, j: int) -> bool:
        return edge_key(i, j) in self.distances

    def distance(self, i: int, j: int) -> float:
        return self.distances[edge_key(i, j)]

    @property
    def n_edges(self) -> int:
        return len(self.distances)

    def true_position(self, v: int) -> np.ndarray:
        if self.is_anchor(v):
            return self.anchor_positions[v]
        if self.ground_truth is None:
            raise InvalidInput("graph carries no ground truth for sensors")
        return self.ground_truth[v]


def generate_rgg(
    n_sensors: int,
    n_anchors: int,
    radio_range: float,
    seed: int,
    corner_anchors: bool = False,
    dim: int = 2,
) -> MeasurementGraph:
    """Random geometric graph on the unit square [-0.5, 0.5]^dim.

    Nodes are drawn uniformly, sensors first, then anchors; an edge is
    present exactly when the true distance is at most radio_range
    (anchor-anchor pairs excluded).  Distances are initialized exact; use
    apply_noise for noisy measurements.

    With corner_anchors, the first four of the n_anchors anchors are pinned
    to the corners (+-0.5, +-0.5) and only the remaining n_anchors - 4 are
    random.  n_anchors counts all anchors, pinned ones included.
    """
    if radio_range <= 0:
        raise InvalidInput("radio_range must be positive")
    if n_sensors < 1 or n_anchors < 1:
        raise InvalidInput("need n_sensors >= 1 and n_anchors >= 1")
    if corner_anchors:
        if dim != 2:
            raise InvalidInput("corner_anchors is only defined for dim=2")
        if n_anchors < 4:
            raise InvalidInput("corner_anchors needs n_anchors >= 4")

    rng = _stream_rng(seed, _POSITION_STREAM)
    sensors = rng.uniform(-0.5, 0.5, size=(n_sensors, dim))
    n_random_anchors = n_anchors - 4 if corner_anchors else n_anchors
    anchors = rng.uniform(-0.5, 0.5, size=(n_random_anchors, dim))
    if corner_anchors:
        corners = np.array(
            [[-0.5, -0.5], [-0.5, 0.5], [0.5, -0.5], [0.5, 0.5]], dtype=float
        )
        anchors = np.vstack([corners, anchors])

    points = np.vstack([sensors, anchors])
    truth = {v: points[v - 1].copy() for v in range(1, n_sensors + n_anchors + 1)}
    anchor_positions = {
        n_sensors + a: points[n_sensors + a - 1].copy() for a in range(1, n_anchors + 1)
    }

    # Pairwise threshold test; anchor-anchor pairs skipped.
    diffs = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diffs**2).sum(axis=2))
    distances: dict[tuple[int, int], float] = {}
    n_total = n_sensors + n_anchors
    for i in range(1, n_total + 1):
        j_start = max(i + 1, n_sensors + 1) if i > n_sensors else i + 1
        for j in range(j_start, n_total + 1):
            if i > n_sensors and j > n_sensors:
                continue
            d_ij = dist[i - 1, j - 1]
            if d_ij <= radio_range:
                distances[(i, j)] = float(d_ij)

    return MeasurementGraph(
        n_sensors=n_sensors,
        n_anchors=n_anchors,
        radio_range=radio_range,
        dim=dim,
        distances=distances,
        anchor_positions=anchor_positions,
        ground_truth=truth,
    )


def graph_from_points(
    points: np.ndarray,
    anchor_indices,
    radio_range: float,
) -> MeasurementGraph:
    """Build a measurement graph from explicit coordinates.

    ``points`` is (n, d); rows listed in ``anchor_indices`` (0-based) become
    anchors, the rest become sensors.  Node ids are assigned so sensors come
    first in original row order, then anchors.  Edges are synthesized by the
    radius rule with exact distances; anchor-anchor pairs are skipped.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] not in (2, 3):
        raise InvalidInput(f"points must be (n, 2) or (n, 3), got {points.shape}")
    n = points.shape[0]
    anchor_set = set(int(a) for a in anchor_indices)
    if not anchor_set or not all(0 <= a < n for a in anchor_set):
        raise InvalidInput("anchor_indices must be non-empty and in range")
    sensor_rows = [i for i in range(n) if i not in anchor_set]
    anchor_rows = sorted(anchor_set)
    if not sensor_rows:
        raise InvalidInput("need at least one sensor row")
    order = sensor_rows + anchor_rows
    reordered = points[order]

    n_sensors = len(sensor_rows)
    n_anchors = len(anchor_rows)
    truth = {v: reordered[v - 1].copy() for v in range(1, n + 1)}
    anchor_positions = {v: truth[v] for v in range(n_sensors + 1, n + 1)}

    distances: dict[tuple[int, int], float] = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if i > n_sensors and j > n_sensors:
                continue
            d_ij = float(np.linalg.norm(reordered[i - 1] - reordered[j - 1]))
            if d_ij <= radio_range:
                distances[(i, j)] = d_ij

    return MeasurementGraph(
        n_sensors=n_sensors,
        n_anchors=n_anchors,
        radio_range=float(radio_range),
        dim=points.shape[1],
        distances=distances,
        anchor_positions=anchor_positions,
        ground_truth=truth,
    )


def apply_noise(g: MeasurementGraph, eta: float, seed: int) -> MeasurementGraph:
    """Multiplicative range noise: each direction measures |1 + eps| * true
    distance with eps ~ N(0, eta^2) i.i.d., and the two directions of every
    edge are averaged into one symmetric measurement.

    Requires ground truth (noise scales the true distance, not the stored
    measurement, so noise application is not compounding).  eta = 0 returns
    an identical copy.  Anchor positions are never perturbed.
    """
    if eta < 0:
        raise InvalidInput("eta must be non-negative")
    if g.ground_truth is None:
        raise InvalidInput("apply_noise requires ground truth")

    edges = sorted(g.distances)
    if eta == 0.0:
        noisy = np.array([g.distances[e] for e in edges])
    else:
        true_d = np.array(
            [np.linalg.norm(g.ground_truth[i] - g.ground_truth[j]) for (i, j) in edges]
        )
        rng = _stream_rng(seed, _NOISE_STREAM)
        eps = rng.normal(0.0, eta, size=(len(edges), 2))
        factors = np.abs(1.0 + eps).mean(axis=1)
        noisy = factors * true_d

    return MeasurementGraph(
        n_sensors=g.n_sensors,
        n_anchors=g.n_anchors,
        radio_range=g.radio_range,
        dim=g.dim,
        distances={e: float(d) for e, d in zip(edges, noisy)},
        anchor_positions={a: p.copy() for a, p in g.anchor_positions.items()},
        ground_truth={v: p.copy() for v, p in g.ground_truth.items()},
    )


@dataclass(frozen=True)
class InducedSubgraph:
    """Induced subgraph presented as an adjacency map over original node ids."""

    nodes: tuple[int, ...]            # sorted ascending
    adj: dict[int, frozenset[int]]    # adjacency within the subgraph

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def adjacency_matrix(self) -> np.ndarray:
        index = {v: k for k, v in enumerate(self.nodes)}
        a = np.zeros((len(self.nodes), len(self.nodes)))
        for v in self.nodes:
            for w in self.adj[v]:
                a[index[v], index[w]] = 1.0
        return a


def _induced(g: MeasurementGraph, node_set: set[int]) -> InducedSubgraph:
    nodes = tuple(sorted(node_set))
    adj = {v: frozenset(g.adjacency[v] & node_set) for v in nodes}
    return InducedSubgraph(nodes=nodes, adj=adj)


def neighborhood_graph(g: MeasurementGraph, i: int) -> InducedSubgraph:
    """Subgraph induced by vertex i together with its neighbors."""
    if i not in g.adjacency:
        raise InvalidInput(f"vertex {i} not in graph")
    return _induced(g, {i} | g.adjacency[i])


def common_neighborhood_graph(g: MeasurementGraph, i: int, j: int) -> InducedSubgraph:
    """Subgraph induced by the intersection of the closed neighborhoods of i and j."""
    if i not in g.adjacency or j not in g.adjacency:
        raise InvalidInput(f"vertex {i} or {j} not in graph")
    if i == j:
        raise InvalidInput("need two distinct vertices")
    return _induced(g, ({i} | g.adjacency[i]) & ({j} | g.adjacency[j]))


def save_graph(g: MeasurementGraph, path, include_truth: bool = True) -> None:
    """Write a graph file; see the module docstring for the grammar."""
    lines = [
        f"snl-graph v1 d={g.dim} N={g.n_sensors} K={g.n_anchors} r={g.radio_range!r}"
    ]
    for a in g.anchors():
        coords = " ".join(repr(float(c)) for c in g.anchor_positions[a])
        lines.append(f"anchor {a} {coords}")
    for (i, j) in sorted(g.distances):
        lines.append(f"edge {i} {j} {g.distances[(i, j)]!r}")
    if include_truth and g.ground_truth is not None:
        for v in sorted(g.ground_truth):
            coords = " ".join(repr(float(c)) for c in g.ground_truth[v])
            lines.append(f"truth {v} {coords}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_header(line_no: int, line: str):
    parts = line.split()
    if len(parts) != 6 or parts[0] != "snl-graph" or parts[1] != "v1":
        raise ParseError(line_no, f"bad header: {line!r}")
    fields = {}
    for part, key in zip(parts[2:], ("d", "N", "K", "r")):
        prefix = key + "="
        if not part.startswith(prefix):
            raise ParseError(line_no, f"expected {prefix}..., got {part!r}")
        try:
            fields[key] = float(part[len(prefix):])
        except ValueError as exc:
            raise ParseError(line_no, f"bad number in {part!r}") from exc
    return int(fields["d"]), int(fields["N"]), int(fields["K"]), fields["r"]


def load_graph(path) -> MeasurementGraph:
    """Parse a graph file.  Raises ParseError with the offending line number."""
    with open(path) as fh:
        raw = fh.read().splitlines()

    header = None
    anchors: dict[int, np.ndarray] = {}
    truth: dict[int, np.ndarray] = {}
    # Duplicate edge lines for one pair are averaged at ingest.
    edge_sums: dict[tuple[int, int], list[float]] = {}

    for line_no, line in enumerate(raw, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if header is None:
            header = _parse_header(line_no, stripped)
            continue
        parts = stripped.split()
        kind = parts[0]
        try:
            if kind == "anchor" or kind == "truth":
                if len(parts) != 2 + header[0]:
                    raise ParseError(
                        line_no, f"{kind} line needs id and {header[0]} coordinates"
                    )
                vid = int(parts[1])
                pos = np.array([float(c) for c in parts[2:]])
                (anchors if kind == "anchor" else truth)[vid] = pos
            elif kind == "edge":
                if len(parts) != 4:
                    raise ParseError(line_no, "edge line needs i, j, dist")
                i, j, d = int(parts[1]), int(parts[2]), float(parts[3])
                if i == j:
                    raise ParseError(line_no, "self-loop edge")
                if d < 0:
                    raise ParseError(line_no, "negative distance")
                edge_sums.setdefault(edge_key(i, j), []).append(d)
            else:
                raise ParseError(line_no, f"unknown line type {kind!r}")
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(line_no, f"bad number: {exc}") from exc

    if header is None:
        raise ParseError(1, "missing header")
    dim, n_sensors, n_anchors, radio_range = header
    expected_anchor_ids = set(range(n_sensors + 1, n_sensors + n_anchors + 1))
    if set(anchors) != expected_anchor_ids:
        raise ParseError(
            len(raw), f"anchor ids {sorted(anchors)} do not match header K={n_anchors}"
        )
    distances = {e: float(np.mean(ds)) for e, ds in edge_sums.items()}
    try:
        return MeasurementGraph(
            n_sensors=n_sensors,
            n_anchors=n_anchors,
            radio_range=radio_range,
            dim=dim,
            distances=distances,
            anchor_positions=anchors,
            ground_truth=truth if truth else None,
        )
    except InvalidInput as exc:
        raise ParseError(len(raw), str(exc)) from exc


def load_points(path) -> np.ndarray:
    """Read a whitespace-separated coordinate file, one point per row.

    Blank lines and ``#`` comments are skipped.  Returns an (n, d) array and
    is the ingest route for structured point sets (shapes, logos) to feed
    graph_from_points.
    """
    rows = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                rows.append([float(c) for c in stripped.split()])
            except ValueError as exc:
                raise ParseError(line_no, f"bad coordinate: {exc}") from exc
    if not rows:
        raise ParseError(1, "no points in file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ParseError(1, "inconsistent coordinate count across rows")
    return np.array(rows)


def diameter_of(points: np.ndarray) -> float:
    """Largest pairwise distance in a point set (reported when loading shapes)."""
    points = np.asarray(points, dtype=float)
    diffs = points[:, None, :] - points[None, :, :]
    return float(np.sqrt((diffs**2).sum(axis=2)).max())
