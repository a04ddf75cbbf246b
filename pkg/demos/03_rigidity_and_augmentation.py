"""Decide whether a patch system is globally rigid, and repair it if not.

Patches that overlap in at least d+1 = 3 shared nodes in enough places pin
each other's reflections; the test is quasi-3-connectivity of the
bipartite correspondence graph (patch vertices vs node vertices), checked
by max flow with unit node capacities.  When the test fails, augmentation
welds weakly-joined patch pairs with extra cliques until it passes.
"""

from cliquesnl.cliques import build_clique_cover
from cliquesnl.graph import generate_rgg
from cliquesnl.rigidity import (
    CorrespondenceGraph,
    augment_configuration,
    build_configuration,
    build_correspondence_graph,
    is_quasi_k_connected,
    max_flow_unit_vertex,
)

# A rigid hand instance: two sensor patches plus the anchor patch, every
# pair sharing three node-disjoint connections.
rigid = CorrespondenceGraph([(1, 2, 3, 4), (1, 2, 5), (3, 4, 5)])
flow = max_flow_unit_vertex(rigid, 0, 1)
print(f"rigid instance: flow between patches 0 and 1 = {flow.value}")
print(f"quasi-3-connected: {is_quasi_k_connected(rigid, 3, exhaustive=True).verdict}")

# A flexible one: patches 2 and 3 hang on just two shared nodes, so they
# can fold over without violating any measurement.
flexible = CorrespondenceGraph([(1, 2, 3), (1, 3), (1, 2, 4), (2, 4)])
verdict = is_quasi_k_connected(flexible, 3, exhaustive=True)
print(f"\nflexible instance: flow between patches 0 and 2 = "
      f"{max_flow_unit_vertex(flexible, 0, 2).value}")
print(f"quasi-3-connected: {verdict.verdict} (min flow {verdict.min_flow}, "
      f"witness pair {verdict.witness})")

# On a sparse random network the raw clique cover often fails the test;
# augmentation then adds welding cliques until the verdict flips.
g = generate_rgg(n_sensors=40, n_anchors=4, radio_range=0.28, seed=10)
cfg = build_configuration(build_clique_cover(g), g)
before = is_quasi_k_connected(build_correspondence_graph(cfg), 3)
print(f"\nrandom network: {cfg.n_patches} patches, quasi-3 before: {before.verdict} "
      f"(min flow {before.min_flow})")
result = augment_configuration(cfg, g)
print(f"augmentation: {result.status} after {len(result.steps)} welds")
for step in result.steps[:3]:
    print(f"  welded patch pair {step.pair} with clique {step.clique}")
print(f"quasi-3 after: {result.quasi.verdict} (min flow {result.quasi.min_flow})")
