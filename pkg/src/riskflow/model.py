"""Core domain types for the scoped risk graph, plus vector arithmetic and
structural validation.

A graph holds elements at risk (objects and process types at any abstraction
level) connected by labeled, importance-weighted edges of two kinds:
``abstraction`` edges carry risk from lower to higher abstraction levels,
``dependency`` edges carry risk along a workflow. Risk and importance are
per-perspective vectors normalized to [0, 1]; everything here is an immutable
value and every operation is a pure function.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import AbstractionCycleError, DimensionError

#: Absolute tolerance used when comparing risk components in tests and checks.
VALUE_TOLERANCE = 1e-9


def _check_unit_range(values: Sequence[float], what: str) -> tuple[float, ...]:
    out = []
    for i, v in enumerate(values):
        v = float(v)
        if not (0.0 <= v <= 1.0):  # also rejects NaN
            raise ValueError(f"{what}[{i}] = {v!r} outside [0, 1]")
        out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class PerspectiveSchema:
    """Ordered list of risk perspective names; index k names vector slot k."""

    names: tuple[str, ...]

    def __init__(self, names: Iterable[str]):
        names = tuple(str(n) for n in names)
        if not names:
            raise ValueError("perspective schema needs at least one name")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate perspective names in {names}")
        object.__setattr__(self, "names", names)

    @property
    def dimension(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            from .errors import UnknownReferenceError

            raise UnknownReferenceError(
                f"unknown perspective {name!r}; known: {', '.join(self.names)}"
            ) from None


class _Vector:
    """Shared behavior for fixed-length [0, 1] vectors."""

    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __getitem__(self, k: int) -> float:
        return self.values[k]

    def as_list(self) -> list[float]:
        return list(self.values)


@dataclass(frozen=True)
class RiskVector(_Vector):
    """Per-perspective risk magnitudes, each in [0, 1]."""

    values: tuple[float, ...]

    def __init__(self, values: Iterable[float]):
        object.__setattr__(self, "values", _check_unit_range(tuple(values), "risk"))

    @classmethod
    def zero(cls, dimension: int) -> "RiskVector":
        return cls((0.0,) * dimension)

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)


@dataclass(frozen=True)
class ImportanceVector(_Vector):
    """Per-perspective edge weights in [0, 1]; a 0 blocks that perspective."""

    values: tuple[float, ...]

    def __init__(self, values: Iterable[float]):
        object.__setattr__(self, "values", _check_unit_range(tuple(values), "importance"))

    @classmethod
    def ones(cls, dimension: int) -> "ImportanceVector":
        return cls((1.0,) * dimension)


class RelationKind(str, Enum):
    ABSTRACTION = "abstraction"
    DEPENDENCY = "dependency"


#: An edge is referenced by its (source, target, label) triple, which
#: validation requires to be unique within a graph.
EdgeRef = tuple[str, str, str]


def format_edge_ref(ref: EdgeRef) -> str:
    source, target, label = ref
    return f"{source}->{target}#{label}"


def parse_edge_ref(text: str) -> EdgeRef:
    head, sep, label = text.partition("#")
    source, arrow, target = head.partition("->")
    if not sep or not arrow or not source or not target or not label:
        raise ValueError(f"edge reference must look like 'src->dst#label', got {text!r}")
    return (source, target, label)


@dataclass(frozen=True)
class ElementAtRisk:
    """A process type or object at risk; the concept string is its
    domain-scope classification (e.g. CyberAsset, ProcessElement)."""

    id: str
    concept: str
    measured_risk: RiskVector | None = None


@dataclass(frozen=True)
class RelationEdge:
    """Directed edge; risk flows source -> target.

    For abstraction edges the source is the lower-abstraction element; for
    dependency edges the source precedes/causes the target.
    """

    source: str
    target: str
    label: str
    kind: RelationKind
    importance: ImportanceVector

    @property
    def ref(self) -> EdgeRef:
        return (self.source, self.target, self.label)


@dataclass(frozen=True)
class RiskGraph:
    """Immutable scoped risk graph.

    ``concept_map`` maps each domain relation label to its generic kind
    (e.g. FollowedBy -> dependency); every edge label must resolve through it.
    """

    schema: PerspectiveSchema
    nodes: tuple[ElementAtRisk, ...]
    edges: tuple[RelationEdge, ...]
    concept_map: Mapping[str, RelationKind] = field(default_factory=dict)

    def __init__(
        self,
        schema: PerspectiveSchema,
        nodes: Iterable[ElementAtRisk],
        edges: Iterable[RelationEdge],
        concept_map: Mapping[str, RelationKind] | None = None,
    ):
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "nodes", tuple(nodes))
        object.__setattr__(self, "edges", tuple(edges))
        cm = {str(k): RelationKind(v) for k, v in (concept_map or {}).items()}
        object.__setattr__(self, "concept_map", cm)

    @cached_property
    def nodes_by_id(self) -> dict[str, ElementAtRisk]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def measured_ids(self) -> frozenset[str]:
        return frozenset(n.id for n in self.nodes if n.measured_risk is not None)

    @cached_property
    def _in_edges(self) -> dict[RelationKind, dict[str, tuple[RelationEdge, ...]]]:
        acc: dict[RelationKind, dict[str, list[RelationEdge]]] = {
            RelationKind.ABSTRACTION: {},
            RelationKind.DEPENDENCY: {},
        }
        for e in self.edges:
            acc[e.kind].setdefault(e.target, []).append(e)
        return {k: {t: tuple(es) for t, es in v.items()} for k, v in acc.items()}

    @cached_property
    def _out_edges(self) -> dict[RelationKind, dict[str, tuple[RelationEdge, ...]]]:
        acc: dict[RelationKind, dict[str, list[RelationEdge]]] = {
            RelationKind.ABSTRACTION: {},
            RelationKind.DEPENDENCY: {},
        }
        for e in self.edges:
            acc[e.kind].setdefault(e.source, []).append(e)
        return {k: {s: tuple(es) for s, es in v.items()} for k, v in acc.items()}

    def in_edges(self, node_id: str, kind: RelationKind) -> tuple[RelationEdge, ...]:
        return self._in_edges[kind].get(node_id, ())

    def out_edges(self, node_id: str, kind: RelationKind) -> tuple[RelationEdge, ...]:
        return self._out_edges[kind].get(node_id, ())

    def edge_for(self, ref: EdgeRef) -> RelationEdge:
        for e in self.edges:
            if e.ref == tuple(ref):
                return e
        from .errors import UnknownReferenceError

        raise UnknownReferenceError(f"no edge {format_edge_ref(tuple(ref))}")

    def node_for(self, node_id: str) -> ElementAtRisk:
        try:
            return self.nodes_by_id[node_id]
        except KeyError:
            from .errors import UnknownReferenceError

            raise UnknownReferenceError(f"no node {node_id!r}") from None


# ---------------------------------------------------------------------------
# Vector operations


def compose_risk(
    probability: float,
    severities: Sequence[float],
    dimension: int | None = None,
) -> RiskVector:
    """Combine an event probability with per-perspective severities into a
    risk vector: result[k] = probability * severities[k]."""
    probability = float(probability)
    if not (0.0 <= probability <= 1.0):
        raise ValueError(f"probability {probability!r} outside [0, 1]")
    values = _check_unit_range(severities, "severity")
    if dimension is not None and len(values) != dimension:
        raise DimensionError(f"expected {dimension} severities, got {len(values)}")
    return RiskVector(probability * s for s in values)


def max_per_aspect(vectors: Iterable[RiskVector], dimension: int) -> RiskVector:
    """Worst-case aggregation: componentwise maximum over a bag of vectors.

    The empty bag yields the zero vector (the identity of max on [0, 1]).
    """
    acc = [0.0] * dimension
    for vec in vectors:
        if len(vec) != dimension:
            raise DimensionError(f"vector of length {len(vec)} in a {dimension}-dim bag")
        for k, v in enumerate(vec):
            if v > acc[k]:
                acc[k] = v
    return RiskVector(acc)


def apply_importance(risk: RiskVector, importance: ImportanceVector) -> RiskVector:
    """Scale a risk vector by an edge's importance, element-wise."""
    if len(risk) != len(importance):
        raise DimensionError(
            f"risk has {len(risk)} components, importance has {len(importance)}"
        )
    return RiskVector(r * w for r, w in zip(risk.values, importance.values))


# ---------------------------------------------------------------------------
# Structural queries


def abstraction_topological_order(graph: RiskGraph) -> tuple[str, ...]:
    """Topological order of all nodes w.r.t. abstraction edges (Kahn).

    Raises AbstractionCycleError when the abstraction subgraph is cyclic;
    edges with dangling endpoints are ignored (validation reports those).
    """
    ids = set(graph.nodes_by_id)
    indeg = {n: 0 for n in ids}
    succ: dict[str, list[str]] = {n: [] for n in ids}
    for e in graph.edges:
        if e.kind is RelationKind.ABSTRACTION and e.source in ids and e.target in ids:
            indeg[e.target] += 1
            succ[e.source].append(e.target)

    queue = deque(n.id for n in graph.nodes if indeg[n.id] == 0)
    order: list[str] = []
    while queue:
        n = queue.popleft()
        order.append(n)
        for m in succ[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                queue.append(m)

    if len(order) != len(ids):
        leftover = {n for n in ids if n not in set(order)}
        raise AbstractionCycleError(_find_cycle(succ, leftover))
    return tuple(order)


def _find_cycle(succ: Mapping[str, list[str]], candidates: set[str]) -> tuple[str, ...]:
    """Walk inside the unresolved node set until a node repeats."""
    start = sorted(candidates)[0]
    seen: list[str] = []
    node = start
    while node not in seen:
        seen.append(node)
        node = next(m for m in sorted(succ[node]) if m in candidates)
    return tuple(seen[seen.index(node):] + [node])


def influence_set(graph: RiskGraph, source_id: str, component: int | None = None) -> set[str]:
    """Nodes that can receive risk originating at ``source_id``.

    Follows the propagation shape: abstraction edges first, then dependency
    edges, where dependency flow never passes through a measured node (their
    followed risk is pinned to zero). With ``component`` set, edges whose
    importance is zero in that perspective are treated as absent.
    """

    def usable(e: RelationEdge) -> bool:
        return component is None or e.importance[component] > 0.0

    reached = {source_id}
    frontier = deque([source_id])
    while frontier:  # abstraction phase
        n = frontier.popleft()
        for e in graph.out_edges(n, RelationKind.ABSTRACTION):
            if usable(e) and e.target not in reached and e.target in graph.nodes_by_id:
                reached.add(e.target)
                frontier.append(e.target)

    frontier = deque(reached)
    while frontier:  # dependency phase, blocked at measured nodes
        n = frontier.popleft()
        for e in graph.out_edges(n, RelationKind.DEPENDENCY):
            if (
                usable(e)
                and e.target in graph.nodes_by_id
                and e.target not in graph.measured_ids
                and e.target not in reached
            ):
                reached.add(e.target)
                frontier.append(e.target)
    return reached


# ---------------------------------------------------------------------------
# Validation


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Issue:
    severity: Severity
    code: str
    where: str
    message: str

    def __str__(self) -> str:
        return f"[{self.severity.value}] {self.code} at {self.where}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...]

    @property
    def ok(self) -> bool:
        return not any(i.severity is Severity.ERROR for i in self.issues)

    def errors(self) -> tuple[Issue, ...]:
        return tuple(i for i in self.issues if i.severity is Severity.ERROR)

    def warnings(self) -> tuple[Issue, ...]:
        return tuple(i for i in self.issues if i.severity is Severity.WARNING)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "issues": [
                {
                    "severity": i.severity.value,
                    "code": i.code,
                    "where": i.where,
                    "message": i.message,
                }
                for i in self.issues
            ],
        }


def validate_graph(graph: RiskGraph) -> ValidationReport:
    """Check every structural invariant; findings land in the report rather
    than raising.

    Errors: duplicate ids, duplicate edge refs, dangling endpoints, unmapped
    or misclassified labels, dimension mismatches, abstraction cycles.
    Warnings: dependency self-loops, missing measured leaves, nodes no
    measured element can influence.
    """
    issues: list[Issue] = []
    error = lambda code, where, msg: issues.append(Issue(Severity.ERROR, code, where, msg))
    warn = lambda code, where, msg: issues.append(Issue(Severity.WARNING, code, where, msg))

    d = graph.schema.dimension
    counts = Counter(n.id for n in graph.nodes)
    for node_id, c in sorted(counts.items()):
        if c > 1:
            error("DuplicateId", f"node:{node_id}", f"id appears {c} times")

    for n in graph.nodes:
        if n.measured_risk is not None and len(n.measured_risk) != d:
            error(
                "DimensionMismatch",
                f"node:{n.id}",
                f"measured risk has {len(n.measured_risk)} components, schema has {d}",
            )

    ids = set(counts)
    ref_counts = Counter(e.ref for e in graph.edges)
    for ref, c in sorted(ref_counts.items()):
        if c > 1:
            error("DuplicateEdge", f"edge:{format_edge_ref(ref)}", f"edge appears {c} times")

    for e in graph.edges:
        where = f"edge:{format_edge_ref(e.ref)}"
        for endpoint in (e.source, e.target):
            if endpoint not in ids:
                error("DanglingEndpoint", where, f"unknown node {endpoint!r}")
        mapped = graph.concept_map.get(e.label)
        if mapped is None:
            error("UnmappedLabel", where, f"label {e.label!r} missing from concept map")
        elif mapped is not e.kind:
            error(
                "KindMismatch",
                where,
                f"edge kind {e.kind.value} but concept map says {mapped.value}",
            )
        if len(e.importance) != d:
            error(
                "DimensionMismatch",
                where,
                f"importance has {len(e.importance)} components, schema has {d}",
            )
        if e.kind is RelationKind.ABSTRACTION and e.source == e.target:
            error("AbstractionCycle", where, "self-abstraction is forbidden")
        if e.kind is RelationKind.DEPENDENCY and e.source == e.target:
            warn("DependencySelfLoop", where, "self-dependency contributes nothing at fixpoint")

    structurally_sound = not any(i.severity is Severity.ERROR for i in issues)
    if structurally_sound:
        try:
            abstraction_topological_order(graph)
        except AbstractionCycleError as exc:
            error("AbstractionCycle", "graph", str(exc))

    if not graph.measured_ids:
        warn("NoMeasuredLeaves", "graph", "no node carries measured risk; propagation is all-zero")

    if structurally_sound and not any(i.severity is Severity.ERROR for i in issues):
        reachable: set[str] = set()
        for m in sorted(graph.measured_ids):
            reachable |= influence_set(graph, m)
        for n in graph.nodes:
            if n.id not in reachable:
                warn(
                    "UnreachableFromMeasured",
                    f"node:{n.id}",
                    "no measured element can influence this node; its risk stays zero",
                )

    return ValidationReport(tuple(issues))
