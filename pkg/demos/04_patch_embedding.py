"""Embed one clique from its distances, then align point sets rigidly.

Classical multidimensional scaling turns a clique's exact distance matrix
into coordinates (up to a rigid motion); the Procrustes closed form then
finds the best rotation-plus-translation onto known targets, which is how
patches get snapped onto their anchors.
"""

import numpy as np

from cliquesnl.graph import generate_rgg
from cliquesnl.mds import cmds, localize_patch, procrustes_align

rng = np.random.default_rng(4)

# Classical MDS on an exact planar clique: rank 2, distances reproduced.
points = rng.uniform(-1.0, 1.0, size=(6, 2))
dist = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
coords, quality = cmds(dist, 2)
recon = np.linalg.norm(coords[:, None, :] - coords[None, :, :], axis=2)
print(f"cmds on an exact 6-clique: rank {quality.rank_used}, "
      f"negative eigenvalue mass {quality.neg_eigen_mass:.1e}")
print(f"worst reconstructed distance gap: {np.abs(recon - dist).max():.2e}")

# Procrustes: recover a planted rotation + translation exactly.
theta = rng.uniform(0, 2 * np.pi)
rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
targets = points @ rot.T + np.array([0.3, -1.2])
transform = procrustes_align(points, targets)
print(f"\nplanted rotation angle {np.degrees(theta):.1f} deg recovered; "
      f"worst point error {np.abs(transform.apply(points) - targets).max():.2e}")

# localize_patch ties both together: embed a clique of a measurement graph
# and align it onto whatever anchors the clique contains.
g = generate_rgg(n_sensors=30, n_anchors=4, radio_range=0.5, seed=1)
from cliquesnl.cliques import build_clique_cover  # noqa: E402 - demo narrative order

cover = build_clique_cover(g)
clique = max(
    cover.cliques, key=lambda c: sum(g.is_anchor(v) for v in c.members)
).members
patch = localize_patch(clique, g)
print(f"\npatch {clique} embedded; anchors inside: {patch.anchors}")
for a in patch.anchors:
    gap = np.linalg.norm(patch.coords[a] - g.anchor_positions[a])
    print(f"  anchor {a} placed {gap:.2e} from its known position")
errors = [
    abs(np.linalg.norm(patch.coords[u] - patch.coords[v]) - g.distance(u, v))
    for u in clique
    for v in clique
    if u < v and g.has_edge(u, v)
]
print(f"worst in-patch distance violation: {max(errors):.2e}")
