"""Build measurement graphs: random geometric networks, range noise, files.

A network has N sensors at unknown positions and K anchors at known
positions, all inside the unit square centered at the origin; two nodes
share a distance measurement when they lie within the radio range (anchor
to anchor pairs are skipped, those positions are already known).
"""

import tempfile
from pathlib import Path

import numpy as np

from cliquesnl.graph import (
    apply_noise,
    diameter_of,
    generate_rgg,
    load_graph,
    save_graph,
)

g = generate_rgg(n_sensors=60, n_anchors=8, radio_range=0.35, seed=7)
print(f"network: N={g.n_sensors} K={g.n_anchors} r={g.radio_range}")
print(f"measured edges: {len(g.distances)}")
degrees = [len(g.neighbors(v)) for v in g.sensors()]
print(f"sensor degree: min {min(degrees)}, mean {np.mean(degrees):.1f}, max {max(degrees)}")
cloud = np.array([g.ground_truth[v] for v in g.nodes()])
print(f"point cloud diameter: {diameter_of(cloud):.3f}")

# Corner anchors pin the first four anchors to the square's corners, the
# setup used by the benchmark tables.
pinned = generate_rgg(60, 8, 0.35, seed=7, corner_anchors=True)
first_four = [pinned.anchor_positions[a] for a in sorted(pinned.anchors())[:4]]
print("corner anchors:", [(float(p[0]), float(p[1])) for p in first_four])

# Multiplicative range noise: each measurement is scaled by |1 + eps| with
# eps drawn per direction and averaged, so eta = 0.1 means roughly 10%
# relative error.  The generation seed and the noise draw are decoupled.
noisy = apply_noise(g, eta=0.1, seed=3)
pairs = sorted(g.distances)[:3]
for i, j in pairs:
    print(f"edge ({i},{j}): true {g.distances[(i, j)]:.4f} -> noisy {noisy.distances[(i, j)]:.4f}")

# Graphs round-trip through a plain text format: one header line, then
# anchor, edge, and optional truth lines.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "demo.graph"
    save_graph(noisy, path)
    again = load_graph(path)
    print(f"file round trip: {len(again.distances)} edges, "
          f"truth preserved: {again.ground_truth is not None}")
    print("first lines of the file:")
    for line in path.read_text().splitlines()[:3]:
        print("   ", line)
