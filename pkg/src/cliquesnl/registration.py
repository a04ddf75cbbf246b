"""Global registration of localized patches and the end-to-end pipeline.

Each localized patch i carries local coordinates x_{k,i}; registration
seeks one orthogonal block O_i and translation t_i per patch, plus global
sensor positions x_k, minimizing the consistency objective

    sum_i [ sum_{sensors k in C_i} ||x_k - O_i x_{k,i} - t_i||^2
            + lam * sum_{anchors l in C_i} ||O_{M+1} a_l - O_i a_l - t_i||^2 ]

where O_{M+1} is the anchor patch's block (gauge; fixed to the identity
after rounding) and a_l are the known anchor positions.  Writing
Z = [x_1 .. x_N  t_1 .. t_M] and O = [O_1 .. O_{M+1}], the objective is
Trace([Z O] [[J, -B^T], [-B, D]] [Z O]^T) with the quadratic forms J, B, D
assembled from patch membership.  Z eliminates in closed form (Z = O B J^-1),
leaving Trace(C O^T O) with C = D - B J^-1 B^T, and relaxing G = O^T O to
the spectrahedron {G psd, d x d diagonal blocks identity} gives a
semidefinite program solved here by ADMM with projection splitting.  The
solution G is rounded back to orthogonal blocks, positions are recovered
through the same closed form, and a final strain descent over all measured
edges (anchors pinned) polishes the result.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import strain
from .cliques import PgdParams, build_clique_cover
from .errors import (
    DegenerateGramWarning,
    DimensionMismatch,
    DisconnectedConfiguration,
    InvalidInput,
)
from .graph import MeasurementGraph
from .mds import localize_configuration
from .numerics import project_block_identity, project_orthogonal, project_psd, symmetrize
from .rigidity import (
    STATUS_RIGID,
    Configuration,
    augment_configuration,
    build_configuration,
    build_correspondence_graph,
    is_quasi_k_connected,
)

_GRAM_RANK_TOL = 1e-12


@dataclass
class RegistrationOperator:
    """Quadratic forms of the registration objective for one configuration.

    Sensor column order follows sensor_ids; translation columns follow the
    patch order.  cho_j caches the Cholesky factor of J, which is positive
    definite exactly when every sensor-and-translation unknown is coupled,
    through patch overlaps, to an anchor-bearing patch.
    """

    j: np.ndarray          # (Ns + M, Ns + M)
    b: np.ndarray          # ((M+1) d, Ns + M)
    d_mat: np.ndarray      # ((M+1) d, (M+1) d)
    c: np.ndarray          # ((M+1) d, (M+1) d), D - B J^-1 B^T
    lam: float
    dim: int
    sensor_ids: tuple[int, ...]
    n_patches: int         # ordinary patches M
    cho_j: tuple = field(repr=False, default=None)

    @property
    def n_blocks(self) -> int:
        return self.n_patches + 1

    def solve_j(self, rhs: np.ndarray) -> np.ndarray:
        return scipy.linalg.cho_solve(self.cho_j, rhs)


def _check_grounding(cfg: Configuration):
    """Every sensor and translation unknown must connect to an anchor-bearing
    patch through shared sensors; otherwise J is singular.  Returns the list
    of ungrounded components as (sensor ids, patch indices) pairs."""
    anchor_set = set(cfg.anchor_ids)
    m = len(cfg.patches)
    # Union-find over sensor ids and patch slots.
    parent: dict = {}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(x, y):
        parent.setdefault(x, x)
        parent.setdefault(y, y)
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    grounded: set = set()
    for p, members in enumerate(cfg.patches):
        slot = ("patch", p)
        parent.setdefault(slot, slot)
        for v in members:
            if v in anchor_set:
                grounded.add(slot)
            else:
                union(("sensor", v), slot)

    roots_grounded = {find(s) for s in grounded}
    components: dict = {}
    for key in parent:
        root = find(key)
        if root in roots_grounded:
            continue
        components.setdefault(root, ([], []))
        kind, value = key
        components[root][0 if kind == "sensor" else 1].append(value)
    return [
        (tuple(sorted(sens)), tuple(sorted(pats)))
        for sens, pats in components.values()
    ]


def assemble_operator(cfg: Configuration, lam: float = 1.0) -> RegistrationOperator:
    """Build J, B, D and the reduced form C = D - B J^-1 B^T.

    Requires localized patches (local_coords present).  lam weights the
    anchor-consistency terms; lam = 1 treats anchor and sensor residuals
    alike.
    """
    if cfg.local_coords is None:
        raise InvalidInput("configuration must be localized before assembly")
    if lam <= 0:
        raise InvalidInput("lam must be positive")
    if not cfg.patches:
        raise InvalidInput("need at least one ordinary patch")

    bad = _check_grounding(cfg)
    if bad:
        detail = "; ".join(
            f"sensors {list(s)} / patches {list(p)}" for s, p in bad
        )
        raise DisconnectedConfiguration(
            f"ungrounded component(s): {detail}", components=bad
        )

    d = cfg.dim
    m = len(cfg.patches)
    anchor_set = set(cfg.anchor_ids)
    sensor_ids = tuple(
        sorted({v for members in cfg.patches for v in members if v not in anchor_set})
    )
    col = {v: k for k, v in enumerate(sensor_ids)}
    ns = len(sensor_ids)
    n_cols = ns + m
    n_block_rows = (m + 1) * d

    j = np.zeros((n_cols, n_cols))
    b = np.zeros((n_block_rows, n_cols))
    d_mat = np.zeros((n_block_rows, n_block_rows))

    for p, members in enumerate(cfg.patches):
        t_col = ns + p
        row = p * d
        anchor_row = m * d
        coords = cfg.local_coords[p]
        for v in members:
            if v in anchor_set:
                a_pos = cfg.anchor_positions[v]
                j[t_col, t_col] += lam
                # f_p = e_{M+1} - e_p acting on the block rows.
                b[anchor_row:anchor_row + d, t_col] += lam * a_pos
                b[row:row + d, t_col] -= lam * a_pos
                outer = lam * np.outer(a_pos, a_pos)
                d_mat[anchor_row:anchor_row + d, anchor_row:anchor_row + d] += outer
                d_mat[row:row + d, row:row + d] += outer
                d_mat[anchor_row:anchor_row + d, row:row + d] -= outer
                d_mat[row:row + d, anchor_row:anchor_row + d] -= outer
            else:
                x_loc = coords[v]
                k = col[v]
                j[k, k] += 1.0
                j[t_col, t_col] += 1.0
                j[k, t_col] -= 1.0
                j[t_col, k] -= 1.0
                b[row:row + d, k] += x_loc
                b[row:row + d, t_col] -= x_loc
                d_mat[row:row + d, row:row + d] += np.outer(x_loc, x_loc)

    try:
        cho = scipy.linalg.cho_factor(j)
    except scipy.linalg.LinAlgError as exc:
        raise DisconnectedConfiguration(
            "registration matrix J is not positive definite"
        ) from exc

    c = symmetrize(d_mat - b @ scipy.linalg.cho_solve(cho, b.T))
    return RegistrationOperator(
        j=j,
        b=b,
        d_mat=d_mat,
        c=c,
        lam=lam,
        dim=d,
        sensor_ids=sensor_ids,
        n_patches=m,
        cho_j=cho,
    )


def spectral_init(c: np.ndarray, d: int) -> np.ndarray:
    """Feasible warm start for the ADMM iteration.

    Stack the d eigenvectors of C with smallest eigenvalues as a
    d x (M+1)d matrix, snap each d x d block onto the orthogonal group, and
    return H0 = O^T O, which is psd with identity diagonal blocks.
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    if c.ndim != 2 or c.shape[1] != n or n % d != 0:
        raise DimensionMismatch(f"C must be square with order divisible by {d}")
    values, vectors = np.linalg.eigh(symmetrize(c))
    w = vectors[:, :d].T  # d smallest eigenvalues
    blocks = []
    with warnings.catch_warnings():
        # Rank-deficient blocks are expected here; the init is heuristic.
        warnings.simplefilter("ignore")
        for i in range(0, n, d):
            blocks.append(project_orthogonal(w[:, i:i + d]))
    o = np.hstack(blocks)
    return o.T @ o


@dataclass(frozen=True)
class AdmmOptions:
    """Stopping controls for the ADMM solver.

    Convergence uses the standard absolute/relative residual mix with
    n = matrix order L: primal threshold L*eps_abs + eps_rel*max(|G|,|H|),
    dual threshold L*eps_abs + eps_rel*|Lambda| (Frobenius norms).
    flip_dual_sign switches the multiplier convention of the splitting (a
    debugging aid; both variants agree in the limit).
    """

    eps_abs: float = 1e-8
    eps_rel: float = 1e-6
    max_iter: int = 20000
    flip_dual_sign: bool = False


@dataclass
class AdmmResult:
    g: np.ndarray
    h: np.ndarray
    iterations: int
    converged: bool
    primal_residual: float
    dual_residual: float
    objective: float
    objective_trace: np.ndarray | None = None


def admm_solve(
    c: np.ndarray,
    d: int,
    rho: float = 0.01,
    opts: AdmmOptions | None = None,
    h0: np.ndarray | None = None,
    track_objective: bool = False,
) -> AdmmResult:
    """Solve min Trace(C G) over psd G with identity d x d diagonal blocks.

    Projection-splitting ADMM: alternate a psd projection (absorbing the
    linear term and the multiplier) with the diagonal-block projection, then
    a multiplier ascent step, starting from the spectral warm start.  If the
    iteration cap is hit the best (final) iterate is returned with
    converged=False.
    """
    opts = opts or AdmmOptions()
    c = symmetrize(np.asarray(c, dtype=float))
    n = c.shape[0]
    if n % d != 0:
        raise DimensionMismatch(f"order {n} not divisible by d={d}")
    if rho <= 0:
        raise InvalidInput("rho must be positive")

    h = spectral_init(c, d) if h0 is None else symmetrize(np.asarray(h0, dtype=float))
    lam_mult = np.zeros_like(c)
    sign = -1.0 if opts.flip_dual_sign else 1.0
    trace_log = [] if track_objective else None

    g = h
    iterations = 0
    converged = False
    primal = dual = np.inf
    for iterations in range(1, opts.max_iter + 1):
        g = project_psd(h - (c - sign * lam_mult) / rho)
        h_prev = h
        h = project_block_identity(g - sign * lam_mult / rho, d)
        lam_mult = lam_mult + sign * rho * (h - g)

        if track_objective:
            trace_log.append(float((c * g).sum()))

        primal = float(np.linalg.norm(g - h))
        dual = rho * float(np.linalg.norm(h - h_prev))
        eps_pri = n * opts.eps_abs + opts.eps_rel * max(
            np.linalg.norm(g), np.linalg.norm(h)
        )
        eps_dual = n * opts.eps_abs + opts.eps_rel * np.linalg.norm(lam_mult)
        if primal <= eps_pri and dual <= eps_dual:
            converged = True
            break

    return AdmmResult(
        g=g,
        h=h,
        iterations=iterations,
        converged=converged,
        primal_residual=primal,
        dual_residual=dual,
        objective=float((c * g).sum()),
        objective_trace=np.array(trace_log) if track_objective else None,
    )


@dataclass
class RoundedSolution:
    blocks: np.ndarray                  # (M+1, d, d) orthogonal, anchor block = I
    z: np.ndarray                       # d x (Ns + M)
    positions: dict[int, np.ndarray]    # sensor id -> position
    translations: np.ndarray            # (M, d)
    gram_rank: int


def round_and_recover(
    g_mat: np.ndarray, op: RegistrationOperator
) -> RoundedSolution:
    """Factor G to d dimensions, snap blocks orthogonal, recover positions.

    The top-d scaled eigenvectors of G give a d x (M+1)d matrix whose d x d
    blocks are projected onto the orthogonal group; the whole stack is then
    composed with the inverse anchor block so the anchor patch maps to
    itself, and Z = O B J^-1 yields sensor positions and patch translations.
    """
    d = op.dim
    n = (op.n_patches + 1) * d
    g_mat = symmetrize(np.asarray(g_mat, dtype=float))
    if g_mat.shape != (n, n):
        raise DimensionMismatch(f"G must be {n} x {n}, got {g_mat.shape}")

    values, vectors = np.linalg.eigh(g_mat)
    order = np.argsort(-values, kind="stable")
    lead = values[order[:d]]
    rank = int((values > _GRAM_RANK_TOL * max(values.max(), 1.0)).sum())
    if rank < d:
        warnings.warn(
            f"Gram matrix rank {rank} below dimension {d} at rounding",
            DegenerateGramWarning,
            stacklevel=2,
        )
    factor = (vectors[:, order[:d]] * np.sqrt(np.maximum(lead, 0.0))).T

    blocks = np.empty((op.n_blocks, d, d))
    for i in range(op.n_blocks):
        blocks[i] = project_orthogonal(factor[:, i * d:(i + 1) * d])
    # Gauge: compose every block with the anchor block's inverse so the
    # anchor patch transform becomes the identity.
    gauge = blocks[-1].T
    for i in range(op.n_blocks):
        blocks[i] = gauge @ blocks[i]

    o_stack = np.hstack([blocks[i] for i in range(op.n_blocks)])
    z = op.solve_j((o_stack @ op.b).T).T
    ns = len(op.sensor_ids)
    positions = {v: z[:, k].copy() for k, v in enumerate(op.sensor_ids)}
    translations = z[:, ns:].T.copy()
    return RoundedSolution(
        blocks=blocks,
        z=z,
        positions=positions,
        translations=translations,
        gram_rank=rank,
    )


def global_stress_refine(
    positions: dict[int, np.ndarray],
    g: MeasurementGraph,
    max_iter: int = 500,
):
    """Strain descent over every measured edge, anchors pinned at truth.

    positions covers sensors; anchors are supplied from the graph.  Returns
    a new sensor position map.
    """
    ids = sorted(positions)
    all_ids = ids + sorted(g.anchors())
    index = {v: k for k, v in enumerate(all_ids)}
    pts = np.array(
        [positions[v] for v in ids] + [g.anchor_positions[a] for a in sorted(g.anchors())]
    )
    free = np.array([not g.is_anchor(v) for v in all_ids])
    edges = []
    d_sq = []
    for (i, j), dist in g.distances.items():
        if i in index and j in index:
            edges.append((index[i], index[j]))
            d_sq.append(dist**2)
    if not edges:
        return {v: positions[v].copy() for v in ids}
    refined, _, _ = strain.descend(
        pts, np.array(edges), np.array(d_sq), free, gtol=1e-10, max_iter=max_iter
    )
    return {v: refined[index[v]].copy() for v in ids}


@dataclass
class PipelineOptions:
    """End-to-end solver controls with the recommended defaults."""

    rho: float = 0.01
    lam: float = 1.0
    eps_abs: float = 1e-8
    eps_rel: float = 1e-6
    max_iter: int = 20000
    augment: bool = True
    exhaustive_rigidity: bool = False
    refine: bool = True
    clique_params: PgdParams = field(default_factory=PgdParams)

    def admm_options(self) -> AdmmOptions:
        return AdmmOptions(
            eps_abs=self.eps_abs, eps_rel=self.eps_rel, max_iter=self.max_iter
        )


@dataclass
class LocalizationReport:
    """Full pipeline output: positions plus diagnostics.

    status is "ok" when rigidity was certified (or augmentation succeeded)
    and the solver converged; "stalled" when augmentation gave up;
    "not-converged" when ADMM hit its iteration cap.  Timings are wall-clock
    seconds per phase.
    """

    positions: dict[int, np.ndarray]
    ane: float | None
    t_partition_s: float
    t_localize_s: float
    t_register_s: float
    admm_iterations: int
    quasi_k: int
    augmentations: int
    status: str
    n_patches: int
    configuration: Configuration | None = None
    augmentation_steps: list = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def localize_network(
    g: MeasurementGraph, opts: PipelineOptions | None = None
) -> LocalizationReport:
    """Run the whole pipeline: cover, rigidity, patch embedding, registration.

    Phases: (1) clique cover, configuration build, and quasi-connectivity
    enforcement; (2) independent patch localization; (3) operator assembly,
    ADMM, rounding, and global strain refinement.  ANE is reported when the
    graph carries ground truth.
    """
    opts = opts or PipelineOptions()
    notes: list[str] = []

    t0 = time.perf_counter()
    cover = build_clique_cover(g, opts.clique_params)
    if cover.uncoverable:
        raise DisconnectedConfiguration(
            f"isolated vertices cannot be localized: {list(cover.uncoverable)}",
            components=[(cover.uncoverable, ())],
        )
    cfg = build_configuration(cover, g)
    steps = []
    if opts.augment:
        aug = augment_configuration(
            cfg, g, exhaustive=opts.exhaustive_rigidity, params=opts.clique_params
        )
        cfg = aug.configuration
        steps = aug.steps
        quasi = aug.quasi
        status = "ok" if aug.status == STATUS_RIGID else "stalled"
    else:
        gamma = build_correspondence_graph(cfg)
        quasi = is_quasi_k_connected(
            gamma, g.dim + 1, exhaustive=opts.exhaustive_rigidity
        )
        status = "ok" if quasi.verdict else "not-rigid"
    if status != "ok":
        notes.append(f"rigidity: {status} (min flow {quasi.min_flow})")
    t_partition = time.perf_counter() - t0

    t0 = time.perf_counter()
    cfg = localize_configuration(cfg, g, refine=opts.refine)
    degenerate = cfg.degenerate_patches()
    if degenerate:
        notes.append(f"degenerate patches (affine rank < d): {degenerate}")
    t_localize = time.perf_counter() - t0

    t0 = time.perf_counter()
    op = assemble_operator(cfg, lam=opts.lam)
    solved = admm_solve(op.c, g.dim, rho=opts.rho, opts=opts.admm_options())
    if not solved.converged:
        notes.append(f"ADMM hit the iteration cap ({solved.iterations})")
        if status == "ok":
            status = "not-converged"
    rounded = round_and_recover(solved.g, op)
    positions = rounded.positions
    if opts.refine:
        positions = global_stress_refine(positions, g)
    t_register = time.perf_counter() - t0

    error = None
    if g.ground_truth is not None:
        from .metrics import ane  # local import: metrics sits above this module

        truth = {v: g.ground_truth[v] for v in g.sensors() if v in positions}
        if len(truth) >= 2:
            error = ane({v: positions[v] for v in truth}, truth)

    return LocalizationReport(
        positions=positions,
        ane=error,
        t_partition_s=t_partition,
        t_localize_s=t_localize,
        t_register_s=t_register,
        admm_iterations=solved.iterations,
        quasi_k=quasi.min_flow,
        augmentations=len(steps),
        status=status,
        n_patches=len(cfg.patches),
        configuration=cfg,
        augmentation_steps=list(steps),
        warnings=notes,
    )
