"""Two-prover games at desk scale: exact values, spectral certificates,
fortification by concatenation, robustness audits, and the adversarial
constructions that show where naive fortification breaks."""

from .adversarial import SkewReport, find_bad_subset, skew_extractor
from .fortifiers import (
    CheckMode,
    CounterexampleSubset,
    EXHAUSTIVE,
    ExtractorCertificate,
    FortifierCertificate,
    check_extractor,
    check_fortifier,
    fortifier_from_expander,
    induced_distribution,
    measure_subsets,
    product_fortifier,
    product_graph,
    sampled,
)
from .fortify import (
    AuditReport,
    ConcatenatedGame,
    DeviationBound,
    audit_distance,
    audit_exact,
    concatenate,
    deviation_bound,
    rectangle_audit_exact,
)
from .games import (
    Distribution,
    Game,
    Labeling,
    SolveResult,
    edge_distribution,
    game_value,
    relation_mask,
    solve_game,
    subgame_value,
    symmetrize,
)
from .graphs import BipartiteGraph, complete_bipartite, cycle_graph, matching_graph
from .regularize import (
    GadgetPlan,
    RegularizeManifest,
    biregularize,
    duplicate_edges,
    regularize_side,
)
from .repetition import (
    PartitionAccounting,
    RepetitionReport,
    partition_accounting,
    repeat_game,
    verify_recursion,
)
from .spectral import (
    ExpanderCertificate,
    generate_expander,
    mixing_discrepancy,
    normalized_adjacency,
    random_biregular,
    spectral_lambda,
)

__version__ = "0.1.0"
