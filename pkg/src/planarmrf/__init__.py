"""Approximate MAP inference for pairwise MRFs on planar grid graphs.

The core pipeline: build a branch decomposition of bounded width, run an
exact dynamic program over it, and wrap both in a slab scheme that
deletes every k-th BFS level to get a (1 - 1/k) approximation on
nonnegative instances. Reductions to correlation clustering and a small
stereo pipeline sit on top.
"""

from .branch import (
    BranchDecomposition,
    build_grid_band,
    build_heuristic,
    root_at,
    width,
)
from .errors import (
    BuildError,
    ConnectivityError,
    DecompositionError,
    InputError,
    InvalidAssignmentError,
    InvalidInstanceError,
    MemoryBudgetError,
    ParseError,
    PlanarMRFError,
    SeedOrderError,
    TooLargeError,
    WidthCapError,
)
from .estimators import (
    CorrelationClusterer,
    ExactMapSolver,
    PlanarMapPTAS,
    StereoMatcher,
)
from .exact import solve_exact
from .graph import Graph, bfs_levels, complete_graph, cycle_graph, grid_graph
from .mrf import (
    MRFInstance,
    brute_force_solve,
    evaluate,
    random_instance,
    shift_nonnegative,
    validate,
)
from .ptas import PtasConfig, PtasDiagnostics, choose_k, solve_ptas
from .reductions import (
    CCEdge,
    CCInstance,
    cc_to_mrf,
    cc_value,
    coloring_gadget,
    labels_to_clustering,
    maxcut_gadget,
)
from .vision import (
    ShiftRegion,
    StereoParams,
    auto_beta,
    build_stereo_instance,
    mislabel_rate,
    scene_fixture,
    shift_scene,
    solve_stereo,
)

__version__ = "0.1.0"

__all__ = [
    "BranchDecomposition",
    "BuildError",
    "CCEdge",
    "CCInstance",
    "ConnectivityError",
    "CorrelationClusterer",
    "DecompositionError",
    "ExactMapSolver",
    "Graph",
    "InputError",
    "InvalidAssignmentError",
    "InvalidInstanceError",
    "MRFInstance",
    "MemoryBudgetError",
    "ParseError",
    "PlanarMRFError",
    "PlanarMapPTAS",
    "PtasConfig",
    "PtasDiagnostics",
    "SeedOrderError",
    "ShiftRegion",
    "StereoMatcher",
    "StereoParams",
    "TooLargeError",
    "WidthCapError",
    "auto_beta",
    "bfs_levels",
    "brute_force_solve",
    "build_grid_band",
    "build_heuristic",
    "build_stereo_instance",
    "cc_to_mrf",
    "cc_value",
    "choose_k",
    "coloring_gadget",
    "complete_graph",
    "cycle_graph",
    "evaluate",
    "grid_graph",
    "labels_to_clustering",
    "maxcut_gadget",
    "mislabel_rate",
    "random_instance",
    "root_at",
    "scene_fixture",
    "shift_nonnegative",
    "shift_scene",
    "solve_exact",
    "solve_ptas",
    "solve_stereo",
    "validate",
    "width",
]
