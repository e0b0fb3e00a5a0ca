"""Process-aware risk propagation over scoped graphs.

Measured per-perspective risk on leaf elements is pushed up abstraction
edges and along workflow dependency edges to every element a process model
contains, with provenance back to the causes. See the README for the full
tour; the usual flow is parse_model -> propagate -> assess/root_causes.
"""

from .assessment import (
    ActionKind,
    Alert,
    MitigationAction,
    RiskDelta,
    RootCause,
    action_from_json,
    apply_mitigation,
    assess,
    diff_results,
    parse_action,
    root_causes,
    top_k,
)
from .errors import (
    AbstractionCycleError,
    ActionWouldInvalidateError,
    DimensionError,
    DocumentSyntaxError,
    EmptyLeafSetWarning,
    GraphTooLargeError,
    IterationLimitExceeded,
    RiskflowError,
    RiskflowWarning,
    SchemaError,
    SchemaMismatchError,
    SnapshotNotFoundError,
    StorageError,
    UnknownReferenceError,
    ValidationError,
)
from .ingest import (
    ExtractionRecord,
    ModelDocument,
    document_from_json,
    document_to_graph,
    extract_records,
    graph_to_document,
    parse_document,
    parse_model,
    serialize_model,
)
from .model import (
    EdgeRef,
    ElementAtRisk,
    ImportanceVector,
    Issue,
    PerspectiveSchema,
    RelationEdge,
    RelationKind,
    RiskGraph,
    RiskVector,
    Severity,
    ValidationReport,
    abstraction_topological_order,
    apply_importance,
    compose_risk,
    format_edge_ref,
    influence_set,
    max_per_aspect,
    parse_edge_ref,
    validate_graph,
)
from .propagation import (
    CONVERGENCE_TOLERANCE,
    TIE_TOLERANCE,
    NodeRisk,
    PropagationResult,
    PropagationStats,
    ProvenanceEntry,
    classify_leaves,
    oracle_propagate,
    propagate,
    propagate_directed,
    propagate_followed,
    replay_witness,
)
from .snapshots import (
    Snapshot,
    SnapshotInfo,
    SnapshotStore,
    diff_snapshots,
    list_snapshots,
    load_snapshot,
    result_from_json,
    result_to_json,
    save_snapshot,
    snapshot_id_for,
)

__version__ = "0.1.0"

__all__ = [
    "AbstractionCycleError",
    "ActionKind",
    "ActionWouldInvalidateError",
    "Alert",
    "CONVERGENCE_TOLERANCE",
    "DimensionError",
    "DocumentSyntaxError",
    "EdgeRef",
    "ElementAtRisk",
    "EmptyLeafSetWarning",
    "ExtractionRecord",
    "GraphTooLargeError",
    "ImportanceVector",
    "Issue",
    "IterationLimitExceeded",
    "MitigationAction",
    "ModelDocument",
    "NodeRisk",
    "PerspectiveSchema",
    "PropagationResult",
    "PropagationStats",
    "ProvenanceEntry",
    "RelationEdge",
    "RelationKind",
    "RiskDelta",
    "RiskGraph",
    "RiskVector",
    "RiskflowError",
    "RiskflowWarning",
    "RootCause",
    "SchemaError",
    "SchemaMismatchError",
    "Severity",
    "Snapshot",
    "SnapshotInfo",
    "SnapshotNotFoundError",
    "SnapshotStore",
    "StorageError",
    "TIE_TOLERANCE",
    "UnknownReferenceError",
    "ValidationError",
    "ValidationReport",
    "abstraction_topological_order",
    "action_from_json",
    "apply_importance",
    "apply_mitigation",
    "assess",
    "classify_leaves",
    "compose_risk",
    "diff_results",
    "diff_snapshots",
    "document_from_json",
    "document_to_graph",
    "extract_records",
    "format_edge_ref",
    "graph_to_document",
    "influence_set",
    "list_snapshots",
    "load_snapshot",
    "max_per_aspect",
    "oracle_propagate",
    "parse_action",
    "parse_document",
    "parse_edge_ref",
    "parse_model",
    "propagate",
    "propagate_directed",
    "propagate_followed",
    "replay_witness",
    "result_from_json",
    "result_to_json",
    "root_causes",
    "save_snapshot",
    "serialize_model",
    "snapshot_id_for",
    "top_k",
    "validate_graph",
]
