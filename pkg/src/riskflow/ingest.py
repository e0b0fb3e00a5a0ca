"""Reading and writing the native model file format.

A model document is a single JSON object carrying the perspective schema, a
label-to-kind map for domain relations, and the node/edge lists. Parsing is
strict by default: unknown fields are rejected so typos in analyst-authored
files surface immediately; ``lenient=True`` downgrades them to warnings.

Error ladder, from the outside in:
  DocumentSyntaxError  malformed JSON / not UTF-8 (positioned)
  SchemaError          recognizable JSON, wrong shape (positioned by path)
  ValidationError      well-formed graph violating structural invariants
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

from .errors import DocumentSyntaxError, RiskflowWarning, SchemaError, ValidationError
from .model import (
    ElementAtRisk,
    ImportanceVector,
    PerspectiveSchema,
    RelationEdge,
    RelationKind,
    RiskGraph,
    RiskVector,
    validate_graph,
)

SUPPORTED_SCHEMA_VERSIONS = ("1",)

_TOP_KEYS = {"schema_version", "perspectives", "relation_kinds", "nodes", "edges"}
_NODE_KEYS = {"id", "concept", "measured_risk"}
_EDGE_KEYS = {"source", "target", "label", "importance"}


@dataclass(frozen=True)
class DocumentNode:
    id: str
    concept: str
    measured_risk: tuple[float, ...] | None = None


@dataclass(frozen=True)
class DocumentEdge:
    source: str
    target: str
    label: str
    importance: tuple[float, ...] | None = None


@dataclass(frozen=True)
class ModelDocument:
    """Structured form of one model file, before graph semantics apply."""

    schema_version: str
    perspectives: tuple[str, ...]
    relation_kinds: dict[str, str]
    nodes: tuple[DocumentNode, ...]
    edges: tuple[DocumentEdge, ...]

    def to_json(self) -> dict:
        """Canonical JSON payload: defaults materialized, map keys sorted,
        node/edge order preserved."""
        dimension = len(self.perspectives)
        nodes = []
        for n in self.nodes:
            entry: dict = {"id": n.id, "concept": n.concept}
            if n.measured_risk is not None:
                entry["measured_risk"] = [float(v) for v in n.measured_risk]
            nodes.append(entry)
        edges = []
        for e in self.edges:
            importance = e.importance if e.importance is not None else (1.0,) * dimension
            edges.append(
                {
                    "source": e.source,
                    "target": e.target,
                    "label": e.label,
                    "importance": [float(v) for v in importance],
                }
            )
        return {
            "schema_version": self.schema_version,
            "perspectives": list(self.perspectives),
            "relation_kinds": {k: self.relation_kinds[k] for k in sorted(self.relation_kinds)},
            "nodes": nodes,
            "edges": edges,
        }


# ---------------------------------------------------------------------------
# Shape checking

def _require(payload: dict, key: str, where: str):
    if key not in payload:
        raise SchemaError(f"missing required field {key!r}", location=where or key)
    return payload[key]


def _as_str(value, where: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(f"expected a string, got {type(value).__name__}", location=where)
    return value


def _as_list(value, where: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(f"expected a list, got {type(value).__name__}", location=where)
    return value


def _as_object(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(f"expected an object, got {type(value).__name__}", location=where)
    return value


def _as_number_list(value, where: str) -> tuple[float, ...]:
    out = []
    for i, v in enumerate(_as_list(value, where)):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaError(
                f"expected a number, got {type(v).__name__}", location=f"{where}[{i}]"
            )
        out.append(float(v))
    return tuple(out)


def _check_keys(payload: dict, allowed: set[str], where: str, lenient: bool) -> None:
    unknown = sorted(set(payload) - allowed)
    if not unknown:
        return
    message = f"unknown field(s) {', '.join(map(repr, unknown))}"
    if lenient:
        warnings.warn(f"{where}: {message} (ignored)", RiskflowWarning, stacklevel=3)
    else:
        raise SchemaError(message, location=where)


def parse_document(data: bytes | str, *, lenient: bool = False) -> ModelDocument:
    """Decode one model file into its structured form; no graph semantics yet."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentSyntaxError(f"document is not valid UTF-8: {exc.reason}") from exc
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    return document_from_json(payload, lenient=lenient)


def document_from_json(payload, *, lenient: bool = False) -> ModelDocument:
    """Shape-check an already-decoded JSON payload into a ModelDocument."""
    payload = _as_object(payload, "document")
    _check_keys(payload, _TOP_KEYS, "document", lenient)

    version = _as_str(_require(payload, "schema_version", ""), "schema_version")
    if version not in SUPPORTED_SCHEMA_VERSIONS:
        raise SchemaError(
            f"unsupported version {version!r}; supported: {', '.join(SUPPORTED_SCHEMA_VERSIONS)}",
            location="schema_version",
        )

    perspectives = tuple(
        _as_str(p, f"perspectives[{i}]")
        for i, p in enumerate(_as_list(_require(payload, "perspectives", ""), "perspectives"))
    )
    if not perspectives:
        raise SchemaError("perspectives must be non-empty", location="perspectives")

    kinds_raw = _as_object(_require(payload, "relation_kinds", ""), "relation_kinds")
    relation_kinds: dict[str, str] = {}
    for label, kind in kinds_raw.items():
        kind = _as_str(kind, f"relation_kinds[{label!r}]")
        if kind not in (RelationKind.ABSTRACTION.value, RelationKind.DEPENDENCY.value):
            raise SchemaError(
                f"kind must be 'abstraction' or 'dependency', got {kind!r}",
                location=f"relation_kinds[{label!r}]",
            )
        relation_kinds[label] = kind

    nodes = []
    for i, raw in enumerate(_as_list(_require(payload, "nodes", ""), "nodes")):
        where = f"nodes[{i}]"
        raw = _as_object(raw, where)
        _check_keys(raw, _NODE_KEYS, where, lenient)
        measured = raw.get("measured_risk")
        nodes.append(
            DocumentNode(
                id=_as_str(_require(raw, "id", where + ".id"), where + ".id"),
                concept=_as_str(_require(raw, "concept", where + ".concept"), where + ".concept"),
                measured_risk=None
                if measured is None
                else _as_number_list(measured, where + ".measured_risk"),
            )
        )

    edges = []
    for i, raw in enumerate(_as_list(_require(payload, "edges", ""), "edges")):
        where = f"edges[{i}]"
        raw = _as_object(raw, where)
        _check_keys(raw, _EDGE_KEYS, where, lenient)
        label = _as_str(_require(raw, "label", where + ".label"), where + ".label")
        if label not in relation_kinds:
            raise SchemaError(
                f"label {label!r} missing from relation_kinds", location=where + ".label"
            )
        importance = raw.get("importance")
        edges.append(
            DocumentEdge(
                source=_as_str(_require(raw, "source", where + ".source"), where + ".source"),
                target=_as_str(_require(raw, "target", where + ".target"), where + ".target"),
                label=label,
                importance=None
                if importance is None
                else _as_number_list(importance, where + ".importance"),
            )
        )

    return ModelDocument(version, perspectives, relation_kinds, tuple(nodes), tuple(edges))


# ---------------------------------------------------------------------------
# Document <-> graph

def document_to_graph(document: ModelDocument) -> RiskGraph:
    """Apply graph semantics to a structured document. Vector values outside
    [0, 1] are reported as positioned SchemaErrors; structural problems are
    left for validate_graph."""
    try:
        schema = PerspectiveSchema(document.perspectives)
    except ValueError as exc:
        raise SchemaError(str(exc), location="perspectives") from exc
    dimension = schema.dimension

    nodes = []
    for i, n in enumerate(document.nodes):
        measured = None
        if n.measured_risk is not None:
            try:
                measured = RiskVector(n.measured_risk)
            except ValueError as exc:
                raise SchemaError(str(exc), location=f"nodes[{i}].measured_risk") from exc
        nodes.append(ElementAtRisk(id=n.id, concept=n.concept, measured_risk=measured))

    edges = []
    for i, e in enumerate(document.edges):
        try:
            importance = (
                ImportanceVector.ones(dimension)
                if e.importance is None
                else ImportanceVector(e.importance)
            )
        except ValueError as exc:
            raise SchemaError(str(exc), location=f"edges[{i}].importance") from exc
        edges.append(
            RelationEdge(
                source=e.source,
                target=e.target,
                label=e.label,
                kind=RelationKind(document.relation_kinds[e.label]),
                importance=importance,
            )
        )

    concept_map = {label: RelationKind(kind) for label, kind in document.relation_kinds.items()}
    return RiskGraph(schema, nodes, edges, concept_map)


def graph_to_document(graph: RiskGraph) -> ModelDocument:
    return ModelDocument(
        schema_version=SUPPORTED_SCHEMA_VERSIONS[-1],
        perspectives=graph.schema.names,
        relation_kinds={label: kind.value for label, kind in graph.concept_map.items()},
        nodes=tuple(
            DocumentNode(
                id=n.id,
                concept=n.concept,
                measured_risk=None if n.measured_risk is None else n.measured_risk.values,
            )
            for n in graph.nodes
        ),
        edges=tuple(
            DocumentEdge(
                source=e.source,
                target=e.target,
                label=e.label,
                importance=e.importance.values,
            )
            for e in graph.edges
        ),
    )


# ---------------------------------------------------------------------------
# Public entry points

def parse_model(data: bytes | str, *, lenient: bool = False) -> RiskGraph:
    """Parse a model file into a validated RiskGraph."""
    graph = document_to_graph(parse_document(data, lenient=lenient))
    report = validate_graph(graph)
    if not report.ok:
        raise ValidationError(report)
    return graph


def serialize_model(graph: RiskGraph) -> bytes:
    """Write a graph back out in canonical form: explicit importance vectors,
    sorted relation_kinds, original node/edge order, two-space indent."""
    payload = graph_to_document(graph).to_json()
    return (json.dumps(payload, indent=2) + "\n").encode("utf-8")


@dataclass(frozen=True)
class ExtractionRecord:
    """One propagation-relevant fact: an edge plus the risk measured on its
    source, when any."""

    source: str
    target: str
    label: str
    source_risk: RiskVector | None
    importance: ImportanceVector


def extract_records(graph: RiskGraph) -> list[ExtractionRecord]:
    """Flatten a graph into per-edge records, sorted by (source, target, label)."""
    records = [
        ExtractionRecord(
            source=e.source,
            target=e.target,
            label=e.label,
            source_risk=graph.nodes_by_id[e.source].measured_risk
            if e.source in graph.nodes_by_id
            else None,
            importance=e.importance,
        )
        for e in graph.edges
    ]
    records.sort(key=lambda r: (r.source, r.target, r.label))
    return records
