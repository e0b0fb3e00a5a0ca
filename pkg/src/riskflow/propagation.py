"""Two-step risk propagation with provenance capture, plus a brute-force
oracle for equivalence testing.

Step 1 pushes measured risk up abstraction edges in topological order
(DirectedRisk). Step 2 runs a worklist to the least fixpoint of the
dependency equations (FollowedRisk), with FollowedRisk pinned to zero on
measured nodes. TotalRisk is the componentwise max of the two. Effective
contribution paths therefore have the shape (abstraction edges)* followed by
(dependency edges)*, and dependency flow never passes through a measured
node.

Everything here is pure: same graph in, same result out, regardless of
worklist scheduling (least fixpoints of monotone maps are unique).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .errors import (
    EmptyLeafSetWarning,
    GraphTooLargeError,
    IterationLimitExceeded,
    ValidationError,
)
from .model import (
    EdgeRef,
    PerspectiveSchema,
    RelationKind,
    RiskGraph,
    RiskVector,
    abstraction_topological_order,
    max_per_aspect,
    validate_graph,
)

#: A followed-risk component must improve by more than this to count as a change.
CONVERGENCE_TOLERANCE = 1e-12
#: Contributions within this distance of the maximum are recorded as ties.
TIE_TOLERANCE = 1e-9
#: Fixpoint safety valve: successful relaxations beyond |V| * d * this factor
#: mean values keep growing, which only happens when an importance > 1 slipped
#: past construction.
RELAXATION_BUDGET_FACTOR = 64

#: Oracle path enumeration is exponential; refuse graphs beyond this size.
ORACLE_NODE_LIMIT = 16


@dataclass(frozen=True)
class NodeRisk:
    directed: RiskVector
    followed: RiskVector
    total: RiskVector


@dataclass(frozen=True)
class ProvenanceEntry:
    """One witness: a measured leaf and an edge path whose importance product
    times the leaf's measured component reproduces the node's total risk."""

    leaf: str
    path: tuple[EdgeRef, ...]


#: node id -> one witness set per perspective index
Provenance = dict[str, tuple[frozenset[ProvenanceEntry], ...]]


@dataclass(frozen=True)
class PropagationStats:
    nodes: int
    sweeps: int
    relaxations: int
    visited: int


@dataclass(frozen=True)
class PropagationResult:
    schema: PerspectiveSchema
    risks: dict[str, NodeRisk]
    provenance: Provenance
    concepts: dict[str, str]
    stats: PropagationStats


def classify_leaves(graph: RiskGraph) -> frozenset[str]:
    """The nodes whose risk is given prior to propagation."""
    leaves = graph.measured_ids
    if not leaves:
        warnings.warn(
            "no node carries measured risk; propagation will be all-zero",
            EmptyLeafSetWarning,
            stacklevel=2,
        )
    return leaves


# ---------------------------------------------------------------------------
# Step 1: directed risk along abstraction edges

def _directed_values(graph: RiskGraph, order: tuple[str, ...]) -> dict[str, list[float]]:
    d = graph.schema.dimension
    out: dict[str, list[float]] = {}
    for node_id in order:
        node = graph.nodes_by_id[node_id]
        acc = list(node.measured_risk.values) if node.measured_risk is not None else [0.0] * d
        for e in graph.in_edges(node_id, RelationKind.ABSTRACTION):
            upstream = out[e.source]
            for k in range(d):
                v = upstream[k] * e.importance[k]
                if v > acc[k]:
                    acc[k] = v
        out[node_id] = acc
    return out


def propagate_directed(graph: RiskGraph) -> dict[str, RiskVector]:
    """DirectedRisk per node: measured risk joined with importance-scaled
    directed risk of abstraction predecessors, in topological order."""
    order = abstraction_topological_order(graph)
    return {n: RiskVector(v) for n, v in _directed_values(graph, order).items()}


# ---------------------------------------------------------------------------
# Step 2: followed risk along dependency edges, to the least fixpoint

def _followed_values(
    graph: RiskGraph, directed: Mapping[str, list[float]]
) -> tuple[dict[str, list[float]], dict[str, list[float]], PropagationStats]:
    d = graph.schema.dimension
    node_ids = [n.id for n in graph.nodes]
    measured = graph.measured_ids

    fr = {n: [0.0] * d for n in node_ids}
    tr = {n: list(directed[n]) for n in node_ids}

    budget = max(1, len(node_ids)) * max(1, d) * RELAXATION_BUDGET_FACTOR
    relaxations = 0
    sweeps = 0
    visited = 0

    # Gauss-Seidel sweeps in node order; deterministic, and any schedule
    # reaches the same least fixpoint. A sweep that changes nothing certifies
    # FR(n) = max over incoming dependency edges of TR(source) * importance.
    while True:
        changed = False
        for n in node_ids:
            if n in measured:
                continue  # followed risk pinned to zero on leaves
            edges = graph.in_edges(n, RelationKind.DEPENDENCY)
            if not edges:
                continue
            visited += 1
            fr_n = fr[n]
            tr_n = tr[n]
            for k in range(d):
                best = 0.0
                for e in edges:
                    v = tr[e.source][k] * e.importance[k]
                    if v > best:
                        best = v
                if best > fr_n[k] + CONVERGENCE_TOLERANCE:
                    fr_n[k] = best
                    if best > tr_n[k]:
                        tr_n[k] = best
                    changed = True
                    relaxations += 1
                    if relaxations > budget:
                        raise IterationLimitExceeded(
                            f"gave up after {relaxations} relaxations "
                            f"(budget {budget} for {len(node_ids)} nodes x {d} perspectives); "
                            "risk keeps growing, which indicates an importance value "
                            "outside [0, 1]"
                        )
        if not changed:
            break
        sweeps += 1

    stats = PropagationStats(
        nodes=len(node_ids), sweeps=sweeps, relaxations=relaxations, visited=visited
    )
    return fr, tr, stats


def propagate_followed(
    graph: RiskGraph, directed: Mapping[str, RiskVector]
) -> dict[str, tuple[RiskVector, RiskVector]]:
    """FollowedRisk and TotalRisk per node, given directed risk.

    The fixpoint is taken over FR(n) = max over incoming dependency edges of
    TR(source) scaled by edge importance, with TR = max(DR, FR) and FR forced
    to zero on measured nodes.
    """
    raw = {n: list(vec.values) for n, vec in directed.items()}
    fr, tr, _ = _followed_values(graph, raw)
    return {n: (RiskVector(fr[n]), RiskVector(tr[n])) for n in fr}


# ---------------------------------------------------------------------------
# Provenance reconstruction

def _directed_witnesses(
    graph: RiskGraph, order: tuple[str, ...], dr: Mapping[str, list[float]]
) -> dict[str, list[set[ProvenanceEntry]]]:
    """Witness sets for each directed-risk component, built leaf-upward.

    A path through a predecessor only achieves the local max when it achieves
    the predecessor's max, so extending stored witnesses is exhaustive.
    """
    d = graph.schema.dimension
    wit: dict[str, list[set[ProvenanceEntry]]] = {}
    for n in order:
        node = graph.nodes_by_id[n]
        sets: list[set[ProvenanceEntry]] = []
        for k in range(d):
            target = dr[n][k]
            entries: set[ProvenanceEntry] = set()
            if target > 0.0:
                if (
                    node.measured_risk is not None
                    and node.measured_risk[k] >= target - TIE_TOLERANCE
                ):
                    entries.add(ProvenanceEntry(n, ()))
                for e in graph.in_edges(n, RelationKind.ABSTRACTION):
                    w = e.importance[k]
                    if w > 0.0 and dr[e.source][k] * w >= target - TIE_TOLERANCE:
                        for prior in wit[e.source][k]:
                            entries.add(ProvenanceEntry(prior.leaf, prior.path + (e.ref,)))
            sets.append(entries)
        wit[n] = sets
    return wit


def _total_witnesses(
    graph: RiskGraph,
    node_id: str,
    k: int,
    dr: Mapping[str, list[float]],
    fr: Mapping[str, list[float]],
    tr: Mapping[str, list[float]],
    dr_wit: Mapping[str, list[set[ProvenanceEntry]]],
    visited: frozenset[str],
) -> set[ProvenanceEntry]:
    """All simple-in-the-dependency-part paths achieving tr[node_id][k].

    ``visited`` holds the dependency-part nodes of the path under
    construction; abstraction prefixes may overlap it freely. Every optimal
    path decomposes into an optimal path to a dependency predecessor (any
    slack would make the total fall short), so recursing only on tying edges
    is exhaustive.
    """
    target = tr[node_id][k]
    out: set[ProvenanceEntry] = set()
    if dr[node_id][k] >= target - TIE_TOLERANCE:
        out |= dr_wit[node_id][k]
    if node_id not in graph.measured_ids and fr[node_id][k] >= target - TIE_TOLERANCE:
        for e in graph.in_edges(node_id, RelationKind.DEPENDENCY):
            p = e.source
            w = e.importance[k]
            if p in visited or w <= 0.0:
                continue
            if tr[p][k] * w >= target - TIE_TOLERANCE:
                for prior in _total_witnesses(
                    graph, p, k, dr, fr, tr, dr_wit, visited | {p}
                ):
                    out.add(ProvenanceEntry(prior.leaf, prior.path + (e.ref,)))
    return out


def _reconstruct_provenance(
    graph: RiskGraph,
    order: tuple[str, ...],
    dr: Mapping[str, list[float]],
    fr: Mapping[str, list[float]],
    tr: Mapping[str, list[float]],
) -> Provenance:
    d = graph.schema.dimension
    dr_wit = _directed_witnesses(graph, order, dr)
    provenance: Provenance = {}
    for n in graph.nodes_by_id:
        sets = []
        for k in range(d):
            if tr[n][k] > 0.0:
                sets.append(
                    frozenset(
                        _total_witnesses(graph, n, k, dr, fr, tr, dr_wit, frozenset((n,)))
                    )
                )
            else:
                sets.append(frozenset())  # zero risk needs no explanation
        provenance[n] = tuple(sets)
    return provenance


def replay_witness(graph: RiskGraph, entry: ProvenanceEntry, k: int) -> float:
    """Recompute the component value a witness claims: the leaf's measured
    component times the importance product along the recorded path."""
    leaf = graph.node_for(entry.leaf)
    if leaf.measured_risk is None:
        raise ValueError(f"witness leaf {entry.leaf!r} carries no measured risk")
    value = leaf.measured_risk[k]
    for ref in entry.path:
        value *= graph.edge_for(ref).importance[k]
    return value


# ---------------------------------------------------------------------------
# Orchestration

def propagate(
    graph: RiskGraph,
    *,
    combine: Callable[[Iterable[RiskVector], int], RiskVector] = max_per_aspect,
) -> PropagationResult:
    """Run both propagation steps and capture provenance.

    ``combine`` is the aggregation slot; max_per_aspect is the only built-in.
    Provenance (which contribution achieved each maximum) is only meaningful
    for max aggregation and is left empty for any other combine function.
    """
    report = validate_graph(graph)
    if not report.ok:
        raise ValidationError(report)

    order = abstraction_topological_order(graph)
    if combine is not max_per_aspect:
        return _propagate_generic(graph, order, combine)

    dr = _directed_values(graph, order)
    fr, tr, stats = _followed_values(graph, dr)
    provenance = _reconstruct_provenance(graph, order, dr, fr, tr)

    risks = {
        n: NodeRisk(
            directed=RiskVector(dr[n]),
            followed=RiskVector(fr[n]),
            total=RiskVector(tr[n]),
        )
        for n in dr
    }
    concepts = {n.id: n.concept for n in graph.nodes}
    return PropagationResult(graph.schema, risks, provenance, concepts, stats)


def _propagate_generic(
    graph: RiskGraph,
    order: tuple[str, ...],
    combine: Callable[[Iterable[RiskVector], int], RiskVector],
) -> PropagationResult:
    """Propagation under a caller-provided aggregation. The fixpoint sweep
    assumes combine is monotone and bounded like max; no provenance."""
    from .model import apply_importance

    d = graph.schema.dimension
    dr: dict[str, RiskVector] = {}
    for n in order:
        node = graph.nodes_by_id[n]
        bag = [] if node.measured_risk is None else [node.measured_risk]
        for e in graph.in_edges(n, RelationKind.ABSTRACTION):
            bag.append(apply_importance(dr[e.source], e.importance))
        dr[n] = combine(bag, d)

    node_ids = [n.id for n in graph.nodes]
    fr = {n: RiskVector.zero(d) for n in node_ids}
    tr = dict(dr)
    budget = max(1, len(node_ids)) * max(1, d) * RELAXATION_BUDGET_FACTOR
    relaxations = sweeps = visited = 0
    while True:
        changed = False
        for n in node_ids:
            if n in graph.measured_ids:
                continue
            edges = graph.in_edges(n, RelationKind.DEPENDENCY)
            if not edges:
                continue
            visited += 1
            candidate = combine([apply_importance(tr[e.source], e.importance) for e in edges], d)
            if any(
                c > old + CONVERGENCE_TOLERANCE for c, old in zip(candidate, fr[n])
            ):
                fr[n] = candidate
                tr[n] = combine([dr[n], candidate], d)
                changed = True
                relaxations += 1
                if relaxations > budget:
                    raise IterationLimitExceeded(
                        f"no fixpoint after {relaxations} relaxations under {combine!r}"
                    )
        if not changed:
            break
        sweeps += 1

    risks = {n: NodeRisk(dr[n], fr[n], tr[n]) for n in node_ids}
    provenance: Provenance = {n: tuple(frozenset() for _ in range(d)) for n in node_ids}
    concepts = {node.id: node.concept for node in graph.nodes}
    stats = PropagationStats(len(node_ids), sweeps, relaxations, visited)
    return PropagationResult(graph.schema, risks, provenance, concepts, stats)


# ---------------------------------------------------------------------------
# Brute-force oracle

def oracle_propagate(graph: RiskGraph) -> PropagationResult:
    """Independent recomputation by exhaustive path enumeration; exponential,
    test-support only.

    Contribution paths run from a measured node through zero or more
    abstraction edges, then zero or more dependency edges whose interior and
    final nodes are unmeasured; the dependency part must be simple (cycles
    cannot beat their own prefix when importance is in [0, 1]). TotalRisk is
    the max contribution per perspective; DirectedRisk restricts to
    abstraction-only paths. FollowedRisk is then read off its one-step
    equation against the enumerated totals, which keeps measured nodes at
    zero and matches the fixpoint exactly when the totals are right.
    """
    if len(graph.nodes) > ORACLE_NODE_LIMIT:
        raise GraphTooLargeError(
            f"oracle enumerates paths; {len(graph.nodes)} nodes exceeds the "
            f"limit of {ORACLE_NODE_LIMIT}"
        )
    report = validate_graph(graph)
    if not report.ok:
        raise ValidationError(report)

    d = graph.schema.dimension
    node_ids = [n.id for n in graph.nodes]
    measured = graph.measured_ids

    dr_best = {n: [0.0] * d for n in node_ids}
    tr_best = {n: [0.0] * d for n in node_ids}
    # (value, witness) candidates per node and perspective, for tie recording
    candidates: dict[str, list[list[tuple[float, ProvenanceEntry]]]] = {
        n: [[] for _ in range(d)] for n in node_ids
    }

    def record(node: str, values: list[float], entry: ProvenanceEntry, directed: bool) -> None:
        for k in range(d):
            v = values[k]
            if v <= 0.0:
                continue
            if directed and v > dr_best[node][k]:
                dr_best[node][k] = v
            if v > tr_best[node][k]:
                tr_best[node][k] = v
            candidates[node][k].append((v, entry))

    def walk_dependency(
        node: str,
        values: list[float],
        leaf: str,
        path: tuple[EdgeRef, ...],
        seen: frozenset[str],
    ) -> None:
        for e in graph.out_edges(node, RelationKind.DEPENDENCY):
            nxt = e.target
            if nxt in seen or nxt in measured:
                continue
            scaled = [values[k] * e.importance[k] for k in range(d)]
            if all(v <= 0.0 for v in scaled):
                continue
            entry = ProvenanceEntry(leaf, path + (e.ref,))
            record(nxt, scaled, entry, directed=False)
            walk_dependency(nxt, scaled, leaf, entry.path, seen | {nxt})

    def walk_abstraction(
        node: str, values: list[float], leaf: str, path: tuple[EdgeRef, ...]
    ) -> None:
        record(node, values, ProvenanceEntry(leaf, path), directed=True)
        walk_dependency(node, values, leaf, path, frozenset((node,)))
        for e in graph.out_edges(node, RelationKind.ABSTRACTION):
            scaled = [values[k] * e.importance[k] for k in range(d)]
            if all(v <= 0.0 for v in scaled):
                continue
            walk_abstraction(e.target, scaled, leaf, path + (e.ref,))

    for m in sorted(measured):
        walk_abstraction(m, list(graph.nodes_by_id[m].measured_risk.values), m, ())

    fr_best = {n: [0.0] * d for n in node_ids}
    for n in node_ids:
        if n in measured:
            continue
        for e in graph.in_edges(n, RelationKind.DEPENDENCY):
            for k in range(d):
                v = tr_best[e.source][k] * e.importance[k]
                if v > fr_best[n][k]:
                    fr_best[n][k] = v

    provenance: Provenance = {}
    for n in node_ids:
        sets = []
        for k in range(d):
            best = tr_best[n][k]
            if best > 0.0:
                sets.append(
                    frozenset(
                        entry
                        for v, entry in candidates[n][k]
                        if v >= best - TIE_TOLERANCE
                    )
                )
            else:
                sets.append(frozenset())
        provenance[n] = tuple(sets)

    risks = {
        n: NodeRisk(
            directed=RiskVector(dr_best[n]),
            followed=RiskVector(fr_best[n]),
            total=RiskVector(tr_best[n]),
        )
        for n in node_ids
    }
    concepts = {node.id: node.concept for node in graph.nodes}
    stats = PropagationStats(len(node_ids), sweeps=0, relaxations=0, visited=len(node_ids))
    return PropagationResult(graph.schema, risks, provenance, concepts, stats)
