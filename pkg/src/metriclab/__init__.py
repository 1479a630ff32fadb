"""metriclab: finite metric and ultrametric spaces as validated matrices.

The package measures three structural moduli (doubling constant,
bottleneck-chain modulus, annulus-emptiness constant), glues spaces
along clopen partitions, and runs carve-and-replace pipelines that move
any space within a small sup-distance of one with a prescribed
combination of those properties.  A seeded experiment driver and a CLI
sit on top.
"""

from .build import (
    ClopenPartition,
    Embedding,
    UPApproximation,
    amalgamate_metric,
    amalgamate_ultrametric,
    approximate_doubling,
    approximate_ud,
    approximate_up,
    carve_pieces,
    default_metric_piece,
    extend_metric,
    greedy_net,
    kuratowski_embed,
    mcshane_extend,
    merge_singletons,
    pairwise_linf,
)
from .cantor import (
    BinaryPointSet,
    TypeTarget,
    cantor_prefix_metric,
    cantor_values,
    euclidean_cantor_metric,
    generate_type,
    geometric_prefix_ultrametric,
    sequential_metric,
    valuation,
)
from .errors import (
    AsymmetricMatrix,
    BadScaleCutoff,
    DegenerateSpace,
    GenerationFailed,
    LabelMismatch,
    LengthMismatch,
    MetricLabError,
    NonpositiveOffDiagonal,
    NonzeroDiagonal,
    NotLipschitzOnSubset,
    NotUltrametric,
    PieceMismatch,
    SeparationUndefined,
    SequenceTooShort,
    ShiftTooLarge,
    StrongTriangleViolation,
    TooFewPoints,
    TriangleViolation,
    ValidationError,
    ValueOutsideRangeSet,
    WindowMiss,
    ZeroOffDiagonal,
)
from .lab import (
    ExperimentConfig,
    TrialRecord,
    matrix_digest,
    random_s_ultrametric,
    random_space,
    render_report,
    run_experiment,
    sample_subsets,
    trial_rng,
)
from .moduli import (
    DEFAULT_THRESHOLDS,
    DoublingReport,
    Thresholds,
    TypeVector,
    UDReport,
    UPReport,
    bottleneck_matrix,
    classify,
    doubling_constant,
    ud_modulus,
    up_constant,
)
from .rangesets import (
    RangeSet,
    ShrinkingSequence,
    WindowCheck,
    contains,
    double_exponential_range_set,
    explicit_range_set,
    exponential_sequence,
    geometric_range_set,
    greatest_leq,
    is_exponential_window,
    ladder,
    least_geq,
    rangeset_from_json,
    rangeset_to_json,
    realized_envelope,
    sequence_from_json,
    sequence_to_json,
    shift,
    up_obstruction,
)
from .spaces import (
    DEFAULT_TOL,
    METRIC,
    ULTRAMETRIC,
    FiniteMetricSpace,
    SubsetStats,
    Violation,
    diagnose,
    metric_closure,
    space_from_json,
    space_to_json,
    subset_stats,
    sup_distance,
    ultra_distance,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "AsymmetricMatrix",
    "BadScaleCutoff",
    "BinaryPointSet",
    "ClopenPartition",
    "DEFAULT_THRESHOLDS",
    "DEFAULT_TOL",
    "DegenerateSpace",
    "DoublingReport",
    "Embedding",
    "ExperimentConfig",
    "FiniteMetricSpace",
    "GenerationFailed",
    "LabelMismatch",
    "LengthMismatch",
    "METRIC",
    "MetricLabError",
    "NonpositiveOffDiagonal",
    "NonzeroDiagonal",
    "NotLipschitzOnSubset",
    "NotUltrametric",
    "PieceMismatch",
    "RangeSet",
    "SeparationUndefined",
    "SequenceTooShort",
    "ShiftTooLarge",
    "ShrinkingSequence",
    "StrongTriangleViolation",
    "SubsetStats",
    "Thresholds",
    "TooFewPoints",
    "TriangleViolation",
    "TrialRecord",
    "TypeTarget",
    "TypeVector",
    "UDReport",
    "ULTRAMETRIC",
    "UPApproximation",
    "UPReport",
    "ValidationError",
    "ValueOutsideRangeSet",
    "Violation",
    "WindowCheck",
    "WindowMiss",
    "ZeroOffDiagonal",
    "amalgamate_metric",
    "amalgamate_ultrametric",
    "approximate_doubling",
    "approximate_ud",
    "approximate_up",
    "bottleneck_matrix",
    "cantor_prefix_metric",
    "cantor_values",
    "carve_pieces",
    "default_metric_piece",
    "classify",
    "contains",
    "diagnose",
    "double_exponential_range_set",
    "doubling_constant",
    "euclidean_cantor_metric",
    "explicit_range_set",
    "exponential_sequence",
    "extend_metric",
    "generate_type",
    "geometric_prefix_ultrametric",
    "geometric_range_set",
    "greatest_leq",
    "greedy_net",
    "is_exponential_window",
    "kuratowski_embed",
    "ladder",
    "least_geq",
    "matrix_digest",
    "mcshane_extend",
    "merge_singletons",
    "metric_closure",
    "pairwise_linf",
    "random_s_ultrametric",
    "random_space",
    "rangeset_from_json",
    "rangeset_to_json",
    "realized_envelope",
    "render_report",
    "run_experiment",
    "sample_subsets",
    "sequence_from_json",
    "sequence_to_json",
    "sequential_metric",
    "shift",
    "space_from_json",
    "space_to_json",
    "subset_stats",
    "sup_distance",
    "trial_rng",
    "ud_modulus",
    "ultra_distance",
    "up_constant",
    "up_obstruction",
    "valuation",
    "validate",
]
