"""Analyst queries over a propagation result: threshold alerts, root-cause
attribution, ranking, and what-if model edits.

What-if answers are never patched risk numbers: a mitigation is an edit
producing a new graph, which is re-propagated in full and diffed against the
baseline.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import (
    ActionWouldInvalidateError,
    RiskflowWarning,
    SchemaMismatchError,
    UnknownReferenceError,
)
from .model import (
    EdgeRef,
    ElementAtRisk,
    ImportanceVector,
    RelationEdge,
    RiskGraph,
    RiskVector,
    format_edge_ref,
    parse_edge_ref,
    validate_graph,
)
from .propagation import PropagationResult


# ---------------------------------------------------------------------------
# Alerts

@dataclass(frozen=True)
class Alert:
    node: str
    perspective: str
    value: float
    threshold: float

    @property
    def margin(self) -> float:
        return self.value - self.threshold

    def to_json(self) -> dict:
        return {
            "node": self.node,
            "perspective": self.perspective,
            "value": self.value,
            "threshold": self.threshold,
            "margin": self.margin,
        }


def assess(result: PropagationResult, thresholds: Mapping[str, float]) -> list[Alert]:
    """Alerts for every (node, perspective) whose total risk reaches the
    perspective's threshold; risk-free pairs never alert, so a zero threshold
    does not flood the list. Sorted by margin descending, then node id.

    Perspectives absent from ``thresholds`` are not checked; a threshold
    above 1 simply matches nothing.
    """
    indexed = [
        (result.schema.index(name), name, float(value))
        for name, value in thresholds.items()
    ]
    alerts = [
        Alert(node=node, perspective=name, value=risk.total[k], threshold=value)
        for node, risk in result.risks.items()
        for k, name, value in indexed
        if risk.total[k] >= value and risk.total[k] > 0.0
    ]
    alerts.sort(key=lambda a: (-a.margin, a.node, result.schema.index(a.perspective)))
    return alerts


# ---------------------------------------------------------------------------
# Root causes and ranking

@dataclass(frozen=True)
class RootCause:
    leaf: str
    path: tuple[EdgeRef, ...]
    value: float

    def to_json(self) -> dict:
        return {
            "leaf": self.leaf,
            "path": [list(ref) for ref in self.path],
            "value": self.value,
        }


def root_causes(result: PropagationResult, node: str, perspective: str) -> list[RootCause]:
    """The measured leaves whose risk reaches this node at full strength in
    one perspective, each with a shortest witnessing path.

    Zero total risk has no causes. Multiple witnesses per leaf collapse to
    one entry (ties across leaves all stay). Sorted by value descending,
    then leaf id.
    """
    k = result.schema.index(perspective)
    if node not in result.risks:
        raise UnknownReferenceError(f"no node {node!r} in this result")
    total = result.risks[node].total[k]
    if total <= 0.0:
        return []
    best_path: dict[str, tuple[EdgeRef, ...]] = {}
    for entry in result.provenance[node][k]:
        prior = best_path.get(entry.leaf)
        if prior is None or (len(entry.path), entry.path) < (len(prior), prior):
            best_path[entry.leaf] = entry.path
    causes = [RootCause(leaf, path, total) for leaf, path in best_path.items()]
    causes.sort(key=lambda c: (-c.value, c.leaf))
    return causes


def top_k(
    result: PropagationResult,
    k: int,
    perspective: str,
    concept: str | None = None,
) -> list[tuple[str, float]]:
    """The k nodes with the highest total risk in one perspective, optionally
    restricted to a concept label. Ties rank by node id."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    idx = result.schema.index(perspective)
    ranked = sorted(
        (
            (node, risk.total[idx])
            for node, risk in result.risks.items()
            if concept is None or result.concepts.get(node) == concept
        ),
        key=lambda pair: (-pair[1], pair[0]),
    )
    return ranked[:k]


# ---------------------------------------------------------------------------
# Mitigation actions

class ActionKind(str, Enum):
    ZERO_MEASURED_RISK = "zero"
    SET_MEASURED_RISK = "risk"
    SET_IMPORTANCE = "importance"
    REMOVE_NODE = "remove-node"
    REMOVE_EDGE = "remove-edge"


@dataclass(frozen=True)
class MitigationAction:
    kind: ActionKind
    node: str | None = None
    edge: EdgeRef | None = None
    risk: RiskVector | None = None
    importance: ImportanceVector | None = None

    @classmethod
    def zero_measured_risk(cls, node: str) -> "MitigationAction":
        return cls(ActionKind.ZERO_MEASURED_RISK, node=node)

    @classmethod
    def set_measured_risk(cls, node: str, risk: RiskVector) -> "MitigationAction":
        return cls(ActionKind.SET_MEASURED_RISK, node=node, risk=risk)

    @classmethod
    def set_importance(cls, edge: EdgeRef, importance: ImportanceVector) -> "MitigationAction":
        return cls(ActionKind.SET_IMPORTANCE, edge=tuple(edge), importance=importance)

    @classmethod
    def remove_node(cls, node: str) -> "MitigationAction":
        return cls(ActionKind.REMOVE_NODE, node=node)

    @classmethod
    def remove_edge(cls, edge: EdgeRef) -> "MitigationAction":
        return cls(ActionKind.REMOVE_EDGE, edge=tuple(edge))

    def describe(self) -> str:
        if self.kind is ActionKind.ZERO_MEASURED_RISK:
            return f"zero:{self.node}"
        if self.kind is ActionKind.SET_MEASURED_RISK:
            return f"risk:{self.node}={','.join(repr(v) for v in self.risk)}"
        if self.kind is ActionKind.SET_IMPORTANCE:
            joined = ",".join(repr(v) for v in self.importance)
            return f"importance:{format_edge_ref(self.edge)}={joined}"
        if self.kind is ActionKind.REMOVE_NODE:
            return f"remove-node:{self.node}"
        return f"remove-edge:{format_edge_ref(self.edge)}"

    def to_json(self) -> dict:
        payload: dict = {"kind": self.kind.value}
        if self.node is not None:
            payload["node"] = self.node
        if self.edge is not None:
            source, target, label = self.edge
            payload["edge"] = {"source": source, "target": target, "label": label}
        if self.risk is not None:
            payload["values"] = self.risk.as_list()
        if self.importance is not None:
            payload["values"] = self.importance.as_list()
        return payload


def action_from_json(payload: Mapping) -> MitigationAction:
    try:
        kind = ActionKind(payload["kind"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"unrecognized action: {exc}") from exc
    if kind is ActionKind.ZERO_MEASURED_RISK:
        return MitigationAction.zero_measured_risk(payload["node"])
    if kind is ActionKind.REMOVE_NODE:
        return MitigationAction.remove_node(payload["node"])
    if kind is ActionKind.SET_MEASURED_RISK:
        return MitigationAction.set_measured_risk(payload["node"], RiskVector(payload["values"]))
    edge = payload["edge"]
    ref = (edge["source"], edge["target"], edge["label"])
    if kind is ActionKind.SET_IMPORTANCE:
        return MitigationAction.set_importance(ref, ImportanceVector(payload["values"]))
    return MitigationAction.remove_edge(ref)


def parse_action(text: str) -> MitigationAction:
    """Parse the compact action syntax used on the command line:

        zero:<node>
        risk:<node>=v1,v2,...
        importance:<src>-><dst>#<label>=w1,w2,...
        remove-node:<node>
        remove-edge:<src>-><dst>#<label>
    """
    kind_token, sep, rest = text.partition(":")
    if not sep or not rest:
        raise ValueError(f"action must look like 'kind:target', got {text!r}")
    try:
        kind = ActionKind(kind_token)
    except ValueError:
        known = ", ".join(k.value for k in ActionKind)
        raise ValueError(f"unknown action kind {kind_token!r}; known: {known}") from None

    if kind is ActionKind.ZERO_MEASURED_RISK:
        return MitigationAction.zero_measured_risk(rest)
    if kind is ActionKind.REMOVE_NODE:
        return MitigationAction.remove_node(rest)
    if kind is ActionKind.REMOVE_EDGE:
        return MitigationAction.remove_edge(parse_edge_ref(rest))

    target, sep, values_text = rest.partition("=")
    if not sep or not values_text:
        raise ValueError(f"action {kind.value!r} needs '=v1,v2,...', got {text!r}")
    values = [float(v) for v in values_text.split(",")]
    if kind is ActionKind.SET_MEASURED_RISK:
        return MitigationAction.set_measured_risk(target, RiskVector(values))
    return MitigationAction.set_importance(parse_edge_ref(target), ImportanceVector(values))


def apply_mitigation(graph: RiskGraph, actions: Sequence[MitigationAction]) -> RiskGraph:
    """Apply model edits in order and return a new validated graph; the input
    graph is never touched.

    Removing a node drops every edge touching it (reported as a warning).
    Edits that leave the graph invalid raise ActionWouldInvalidateError with
    the full report.
    """
    nodes: list[ElementAtRisk] = list(graph.nodes)
    edges: list[RelationEdge] = list(graph.edges)

    def node_index(node_id: str) -> int:
        for i, n in enumerate(nodes):
            if n.id == node_id:
                return i
        raise UnknownReferenceError(f"no node {node_id!r}")

    def edge_index(ref: EdgeRef) -> int:
        for i, e in enumerate(edges):
            if e.ref == tuple(ref):
                return i
        raise UnknownReferenceError(f"no edge {format_edge_ref(tuple(ref))}")

    for action in actions:
        if action.kind is ActionKind.ZERO_MEASURED_RISK:
            i = node_index(action.node)
            if nodes[i].measured_risk is None:
                raise UnknownReferenceError(
                    f"node {action.node!r} carries no measured risk to zero"
                )
            zero = RiskVector.zero(len(nodes[i].measured_risk))
            nodes[i] = ElementAtRisk(nodes[i].id, nodes[i].concept, zero)
        elif action.kind is ActionKind.SET_MEASURED_RISK:
            i = node_index(action.node)
            nodes[i] = ElementAtRisk(nodes[i].id, nodes[i].concept, action.risk)
        elif action.kind is ActionKind.SET_IMPORTANCE:
            i = edge_index(action.edge)
            e = edges[i]
            edges[i] = RelationEdge(e.source, e.target, e.label, e.kind, action.importance)
        elif action.kind is ActionKind.REMOVE_NODE:
            i = node_index(action.node)
            del nodes[i]
            dropped = [e for e in edges if action.node in (e.source, e.target)]
            if dropped:
                edges = [e for e in edges if action.node not in (e.source, e.target)]
                warnings.warn(
                    f"removing node {action.node!r} also removed "
                    f"{', '.join(format_edge_ref(e.ref) for e in dropped)}",
                    RiskflowWarning,
                    stacklevel=2,
                )
        elif action.kind is ActionKind.REMOVE_EDGE:
            del edges[edge_index(action.edge)]

    edited = RiskGraph(graph.schema, nodes, edges, graph.concept_map)
    report = validate_graph(edited)
    if not report.ok:
        raise ActionWouldInvalidateError(report)
    return edited


# ---------------------------------------------------------------------------
# Diffing

@dataclass(frozen=True)
class RiskDelta:
    """Componentwise total-risk movement between two results over the same
    perspective schema. ``changes`` holds (before, after, delta) triples per
    common node; nodes present on only one side are listed with their totals.
    """

    perspectives: tuple[str, ...]
    changes: dict[str, tuple[tuple[float, float, float], ...]]
    before_only: dict[str, RiskVector]
    after_only: dict[str, RiskVector]
    max_abs_delta: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "perspectives": list(self.perspectives),
            "changes": {
                node: [
                    {"before": b, "after": a, "delta": dl}
                    for b, a, dl in triples
                ]
                for node, triples in self.changes.items()
            },
            "before_only": {n: v.as_list() for n, v in self.before_only.items()},
            "after_only": {n: v.as_list() for n, v in self.after_only.items()},
            "max_abs_delta": list(self.max_abs_delta),
        }


def diff_results(before: PropagationResult, after: PropagationResult) -> RiskDelta:
    """Total-risk deltas (after minus before) for every node the two results
    share, plus the nodes only one side has."""
    if before.schema.names != after.schema.names:
        raise SchemaMismatchError(
            f"perspectives differ: {before.schema.names} vs {after.schema.names}"
        )
    d = before.schema.dimension
    common = [n for n in before.risks if n in after.risks]
    changes: dict[str, tuple[tuple[float, float, float], ...]] = {}
    max_abs = [0.0] * d
    for n in common:
        b = before.risks[n].total
        a = after.risks[n].total
        triples = []
        for k in range(d):
            delta = a[k] - b[k]
            triples.append((b[k], a[k], delta))
            if abs(delta) > max_abs[k]:
                max_abs[k] = abs(delta)
        changes[n] = tuple(triples)
    return RiskDelta(
        perspectives=before.schema.names,
        changes=changes,
        before_only={n: r.total for n, r in before.risks.items() if n not in after.risks},
        after_only={n: r.total for n, r in after.risks.items() if n not in before.risks},
        max_abs_delta=tuple(max_abs),
    )
