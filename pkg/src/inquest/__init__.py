"""Evidential reasoning on tree-structured inference networks.

The package splits into five layers: the network schema and file
format (`model`), exact inference plus the enumeration oracle
(`propagation`), query-selection strategies and sessions
(`strategies`), the simulation and comparison harness (`simulate`),
and the interactive session service (`service`) with its CLI (`cli`).
"""

from .model import (
    ContradictionError,
    Evidence,
    EvidenceError,
    EvidenceValue,
    Hard,
    InquestError,
    LinkCpt,
    LinkSpec,
    NetworkFormatError,
    NetworkSpec,
    NetworkValidationError,
    NodeKind,
    NodeSpec,
    SessionError,
    Soft,
    Thresholds,
    load_network,
    network_from_dict,
    network_to_dict,
    serialize_network,
    validate_network,
)
from .propagation import (
    BeliefState,
    DepthVector,
    DepthVectorError,
    VirtualTree,
    chain_links,
    chain_path,
    enumerate_posterior,
    propagate_beliefs,
    transform_tree,
    virtual_link,
    virtual_tree_to_dict,
)
from .strategies import (
    Decision,
    EvKind,
    EvTiming,
    Goal,
    Mode,
    QueryRecord,
    SessionState,
    StrategySpec,
    apply_override,
    create_session,
    decide,
    decision_nodes,
    ev_discrimination,
    ev_info_gain,
    goal_met,
    goal_nodes,
    leaf_score,
    normalize_strategy,
    run_to_termination,
    select_next,
    step,
)
from .simulate import (
    Case,
    ComparisonReport,
    StrategyStats,
    TargetStats,
    TrialResult,
    case_rng,
    cases_from_csv,
    cases_to_csv,
    compare_report,
    generate_cases,
    run_trials,
    sample_case,
)
from .fixtures import figure4

__version__ = "0.1.0"
