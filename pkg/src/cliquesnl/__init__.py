"""Sensor network localization by clique partitioning and registration.

Pipeline: cover the measurement graph with maximal cliques (one per
vertex), certify and, if needed, augment the patch system until it is
quasi-(d+1)-connected, embed each clique by classical MDS, then register
all patches at once through a semidefinite relaxation solved by ADMM,
followed by rounding and strain refinement.
"""

from .cliques import Clique, CliqueCover, PgdParams, build_clique_cover, find_clique_pgd
from .errors import (
    DegenerateGramWarning,
    DegenerateRoundingWarning,
    DimensionMismatch,
    DisconnectedConfiguration,
    InternalError,
    InvalidInput,
    ParseError,
    SnlError,
)
from .experiments import AblationReport, ExperimentConfig, rigidity_ablation, run_grid
from .graph import (
    MeasurementGraph,
    apply_noise,
    generate_rgg,
    graph_from_points,
    load_graph,
    load_points,
    save_graph,
)
from .mds import Patch, PatchQuality, RigidTransform, cmds, localize_patch, procrustes_align
from .metrics import ane
from .registration import (
    AdmmOptions,
    LocalizationReport,
    PipelineOptions,
    RegistrationOperator,
    admm_solve,
    assemble_operator,
    global_stress_refine,
    localize_network,
    round_and_recover,
    spectral_init,
)
from .rigidity import (
    Configuration,
    augment_configuration,
    build_configuration,
    build_correspondence_graph,
    is_quasi_k_connected,
    max_flow_unit_vertex,
    min_cut_patch_sets,
)

__version__ = "0.1.0"

__all__ = [
    "AblationReport",
    "AdmmOptions",
    "Clique",
    "CliqueCover",
    "Configuration",
    "DegenerateGramWarning",
    "DegenerateRoundingWarning",
    "DimensionMismatch",
    "DisconnectedConfiguration",
    "ExperimentConfig",
    "InternalError",
    "InvalidInput",
    "LocalizationReport",
    "MeasurementGraph",
    "ParseError",
    "Patch",
    "PatchQuality",
    "PgdParams",
    "PipelineOptions",
    "RegistrationOperator",
    "RigidTransform",
    "SnlError",
    "admm_solve",
    "ane",
    "apply_noise",
    "assemble_operator",
    "augment_configuration",
    "build_clique_cover",
    "build_configuration",
    "build_correspondence_graph",
    "cmds",
    "find_clique_pgd",
    "generate_rgg",
    "global_stress_refine",
    "graph_from_points",
    "is_quasi_k_connected",
    "load_graph",
    "load_points",
    "localize_network",
    "localize_patch",
    "max_flow_unit_vertex",
    "min_cut_patch_sets",
    "procrustes_align",
    "rigidity_ablation",
    "round_and_recover",
    "run_grid",
    "save_graph",
    "spectral_init",
]
