from bridgefold.agraph.engine import FoldStep, FoldTrace, format_trace, run_folds, step_bound
from bridgefold.agraph.folds import (
    Auxiliary,
    FoldWitness,
    apply_auxiliary,
    apply_fold,
    backward_preimage,
    find_fold,
    fold_IA,
    fold_IIA_backward,
    fold_IIA_forward,
    forward_preimage,
    forced_fold_pair,
    is_folded,
    solve_pair,
)
from bridgefold.agraph.graph import (
    AGraph,
    APath,
    BEdge,
    BVertex,
    Complexity,
    build_initial,
    c1,
    c2,
    complete_graph,
    complexity,
    graph_dump,
    is_complete,
    is_full,
    is_isolated,
    is_tame,
)
from bridgefold.agraph.paths import format_path, parse_paths

__all__ = [
    "AGraph",
    "APath",
    "Auxiliary",
    "BEdge",
    "BVertex",
    "Complexity",
    "FoldStep",
    "FoldTrace",
    "FoldWitness",
    "apply_auxiliary",
    "apply_fold",
    "backward_preimage",
    "build_initial",
    "c1",
    "c2",
    "complete_graph",
    "complexity",
    "find_fold",
    "fold_IA",
    "fold_IIA_backward",
    "fold_IIA_forward",
    "format_path",
    "format_trace",
    "forward_preimage",
    "graph_dump",
    "forced_fold_pair",
    "is_complete",
    "is_folded",
    "is_full",
    "is_isolated",
    "is_tame",
    "parse_paths",
    "run_folds",
    "solve_pair",
    "step_bound",
]
