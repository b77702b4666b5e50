"""Rotor walks on finite sink-truncated graphs.

Build a graph with an origin and absorbing sinks, solve the voltage form of
its Green function, derive edge weights whose per-vertex minimizers give the
escape-rate-maximizing rotor configuration, and run the deterministic
n-particle escape experiment with its conserved quantity checked throughout.
"""
from .errors import (
    AbortedMaxSteps,
    DimensionMismatch,
    GraphInvalid,
    IndexOutOfRange,
    InvalidParameter,
    NonConvergence,
    RotorWalkError,
    SinkHasNoRotor,
)
from .graphs import (
    Graph,
    RotorMechanism,
    build_bary_tree,
    build_lattice_ball,
    build_path,
    check_graph,
    check_mechanism,
    default_mechanism,
    load_edge_list,
    save_edge_list,
    shuffled_mechanism,
)
from .harmonic import (
    HarmonicProfile,
    VisitEstimates,
    mc_green,
    residual,
    solve_harmonic,
)
from .weights import (
    RotorConfig,
    WeightTable,
    check_config,
    count_min_weight_ties,
    edge_weight,
    min_weight_config,
    random_config,
    weight_increment,
    weight_table,
)
from .experiment import (
    ExperimentState,
    ParticleStatus,
    compute_invariant,
    init_experiment,
    range_at,
    run_until_settled,
    step,
    survivors_at,
)
from .analysis import (
    EnsembleSummary,
    EscapeReport,
    InvariantTracker,
    TheoremCheckResult,
    escape_sweep,
    random_ensemble,
    srw_escape_mc,
    theorem_check,
)
from .rng import philox_generator
from .verify import CheckRecord, run_verification

__version__ = "0.1.0"

__all__ = [
    "AbortedMaxSteps",
    "CheckRecord",
    "DimensionMismatch",
    "EnsembleSummary",
    "EscapeReport",
    "ExperimentState",
    "Graph",
    "GraphInvalid",
    "HarmonicProfile",
    "IndexOutOfRange",
    "InvalidParameter",
    "InvariantTracker",
    "NonConvergence",
    "ParticleStatus",
    "RotorConfig",
    "RotorMechanism",
    "RotorWalkError",
    "SinkHasNoRotor",
    "TheoremCheckResult",
    "VisitEstimates",
    "WeightTable",
    "build_bary_tree",
    "build_lattice_ball",
    "build_path",
    "check_config",
    "check_graph",
    "check_mechanism",
    "compute_invariant",
    "count_min_weight_ties",
    "default_mechanism",
    "edge_weight",
    "escape_sweep",
    "init_experiment",
    "load_edge_list",
    "mc_green",
    "min_weight_config",
    "philox_generator",
    "random_config",
    "random_ensemble",
    "range_at",
    "residual",
    "run_until_settled",
    "run_verification",
    "save_edge_list",
    "shuffled_mechanism",
    "solve_harmonic",
    "srw_escape_mc",
    "step",
    "survivors_at",
    "theorem_check",
    "weight_increment",
    "weight_table",
    "__version__",
]
