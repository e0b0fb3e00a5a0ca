import random

import pytest

from riskflow import (
    EmptyLeafSetWarning,
    GraphTooLargeError,
    IterationLimitExceeded,
    ProvenanceEntry,
    RiskVector,
    ValidationError,
    classify_leaves,
    document_to_graph,
    document_from_json,
    max_per_aspect,
    oracle_propagate,
    propagate,
    propagate_directed,
    propagate_followed,
    replay_witness,
)
from graphgen import cyclic_all_ones_document, quick_graph, random_document


def build(payload):
    return document_to_graph(document_from_json(payload))


# ---------------------------------------------------------------------------
# Directed pass


def test_directed_worked_example():
    g = quick_graph(
        4,
        [("B", [0.9, 0.1, 0.0, 0.5]), ("C", [0.2, 0.8, 0.3, 0.4]), ("A", None)],
        [("B", "A", "Abs", None), ("C", "A", "Abs", [0.5, 1.0, 1.0, 0.0])],
    )
    dr = propagate_directed(g)
    assert dr["A"].values == (0.9, 0.8, 0.3, 0.5)


def test_directed_chains_multiply_importance():
    g = quick_graph(
        1,
        [("leaf", [0.8]), ("mid", None), ("top", None)],
        [("leaf", "mid", "Abs", [0.5]), ("mid", "top", "Abs", [0.5])],
    )
    dr = propagate_directed(g)
    assert dr["mid"].values == (0.4,)
    assert dr["top"].values == (0.8 * 0.5 * 0.5,)


def test_zero_importance_component_blocks():
    g = quick_graph(
        2,
        [("leaf", [0.7, 0.7]), ("up", None)],
        [("leaf", "up", "Abs", [0.0, 1.0])],
    )
    dr = propagate_directed(g)
    assert dr["up"].values == (0.0, 0.7)


def test_measured_interior_node_keeps_both_sources():
    # a measured node still receives upstream abstraction risk
    g = quick_graph(
        1,
        [("leaf", [0.9]), ("gauge", [0.2])],
        [("leaf", "gauge", "Abs", None)],
    )
    dr = propagate_directed(g)
    assert dr["gauge"].values == (0.9,)


# ---------------------------------------------------------------------------
# Followed pass


def cycle_pair():
    return quick_graph(
        4,
        [
            ("la", [0.6, 0.0, 0.0, 0.0]),
            ("lb", [0.0, 0.4, 0.0, 0.0]),
            ("A", None),
            ("B", None),
        ],
        [
            ("la", "A", "Abs", None),
            ("lb", "B", "Abs", None),
            ("A", "B", "Dep", None),
            ("B", "A", "Dep", None),
        ],
    )


def test_cycle_reaches_joint_fixpoint():
    g = cycle_pair()
    result = propagate(g)
    expected = (0.6, 0.4, 0.0, 0.0)
    assert result.risks["A"].total.values == expected
    assert result.risks["B"].total.values == expected
    assert result.risks["A"].directed.values == (0.6, 0.0, 0.0, 0.0)
    assert result.risks["B"].directed.values == (0.0, 0.4, 0.0, 0.0)


def test_followed_zero_on_measured_nodes():
    g = quick_graph(
        1,
        [("leaf", [0.9]), ("gate", [0.2]), ("behind", None)],
        [("leaf", "gate", "Dep", None), ("gate", "behind", "Dep", None)],
    )
    dr = propagate_directed(g)
    followed = propagate_followed(g, dr)
    fr_gate, tr_gate = followed["gate"]
    fr_behind, tr_behind = followed["behind"]
    assert fr_gate.is_zero()
    # the gate's own measurement flows on, the upstream leaf's does not
    assert tr_gate.values == (0.2,)
    assert fr_behind.values == (0.2,)
    assert tr_behind.values == (0.2,)


def test_total_is_max_of_both_routes():
    g = cycle_pair()
    result = propagate(g)
    for node, risk in result.risks.items():
        assert risk.total == max_per_aspect([risk.directed, risk.followed], 4)


def test_stats_on_demo(demo_result):
    stats = demo_result.stats
    assert stats.nodes == 16
    assert stats.sweeps <= 16
    assert stats.relaxations > 0


def test_runaway_importance_trips_the_valve():
    g = quick_graph(
        1,
        [("leaf", [0.5]), ("A", None), ("B", None)],
        [("leaf", "A", "Abs", None), ("A", "B", "Dep", None), ("B", "A", "Dep", None)],
    )
    for edge in g.edges:
        if edge.label == "Dep":
            object.__setattr__(edge.importance, "values", (1.5,))
    with pytest.raises(IterationLimitExceeded):
        propagate(g)


def test_cyclic_all_ones_converges_within_node_budget():
    for seed in range(5):
        g = build(cyclic_all_ones_document(random.Random(7000 + seed)))
        result = propagate(g)
        assert result.stats.sweeps <= len(g.nodes)


# ---------------------------------------------------------------------------
# Full propagation


def test_propagate_validates_first():
    g = quick_graph(1, [("a", [0.5])], [("a", "ghost", "Dep", None)])
    with pytest.raises(ValidationError):
        propagate(g)


def test_propagate_is_deterministic(demo_graph):
    first = propagate(demo_graph)
    second = propagate(demo_graph)
    assert first.risks == second.risks
    assert first.provenance == second.provenance


def test_demo_regression(demo_result):
    peak = (0.9, 0.85, 0.7, 0.9)
    assert demo_result.risks["asset-210"].total.values == peak
    assert demo_result.risks["DoorDisassembly"].total.values == peak
    dash = demo_result.risks["DashboardInstallation"]
    assert dash.directed.is_zero()
    assert dash.total.values == peak
    va = demo_result.risks["VehicleAssembly"]
    assert va.followed.is_zero()
    assert va.total.values == peak
    assert demo_result.risks["asset-212"].total.is_zero()


def test_concepts_carried_onto_result(demo_result):
    assert demo_result.concepts["imp-A"] == "CyberImpact"
    assert demo_result.concepts["VehicleAssembly"] == "ProcessElement"


def test_custom_combine_falls_back_to_generic():
    def shadow_max(vectors, dimension):
        return max_per_aspect(list(vectors), dimension)

    g = cycle_pair()
    plain = propagate(g)
    generic = propagate(g, combine=shadow_max)
    for node in plain.risks:
        assert generic.risks[node].total == plain.risks[node].total
    assert all(not any(cells) for cells in generic.provenance.values())


# ---------------------------------------------------------------------------
# Leaves


def test_classify_leaves(demo_graph):
    leaves = classify_leaves(demo_graph)
    assert leaves == {f"imp-{c}" for c in "ABCDEFGHIJ"}


def test_empty_leaf_set_warns():
    g = quick_graph(1, [("a", None), ("b", None)], [("a", "b", "Abs", None)])
    with pytest.warns(EmptyLeafSetWarning):
        assert classify_leaves(g) == frozenset()


# ---------------------------------------------------------------------------
# Provenance


def test_leaf_witnesses_itself():
    g = quick_graph(2, [("leaf", [0.5, 0.0])], [])
    result = propagate(g)
    strong, silent = result.provenance["leaf"]
    assert strong == frozenset({ProvenanceEntry("leaf", ())})
    assert silent == frozenset()


def test_witness_paths_through_chain():
    g = quick_graph(
        1,
        [("leaf", [0.8]), ("mid", None), ("top", None)],
        [("leaf", "mid", "Abs", None), ("mid", "top", "Dep", None)],
    )
    result = propagate(g)
    (entries,) = result.provenance["top"]
    assert entries == frozenset(
        {ProvenanceEntry("leaf", (("leaf", "mid", "Abs"), ("mid", "top", "Dep")))}
    )


def test_ties_record_every_witness():
    g = quick_graph(
        1,
        [("l1", [0.5]), ("l2", [0.5]), ("join", None)],
        [("l1", "join", "Abs", None), ("l2", "join", "Abs", None)],
    )
    result = propagate(g)
    (entries,) = result.provenance["join"]
    assert {e.leaf for e in entries} == {"l1", "l2"}


def test_replay_reproduces_totals(demo_graph, demo_result):
    for node, risk in demo_result.risks.items():
        for k, cell in enumerate(demo_result.provenance[node]):
            total = risk.total[k]
            if total == 0.0:
                assert cell == frozenset()
                continue
            assert cell
            values = [replay_witness(demo_graph, entry, k) for entry in cell]
            assert max(values) == total  # bitwise, not approximate
            assert all(abs(v - total) <= 1e-9 for v in values)


def test_replay_rejects_unmeasured_leaf(demo_graph):
    with pytest.raises(ValueError):
        replay_witness(demo_graph, ProvenanceEntry("DoorDisassembly", ()), 0)


# ---------------------------------------------------------------------------
# Oracle


def test_oracle_refuses_large_graphs():
    nodes = [(f"n{i}", [0.1]) for i in range(17)]
    g = quick_graph(1, nodes, [])
    with pytest.raises(GraphTooLargeError):
        oracle_propagate(g)


def test_oracle_matches_engine_on_demo(demo_graph, demo_result):
    expected = oracle_propagate(demo_graph)
    for node, risk in demo_result.risks.items():
        want = expected.risks[node]
        assert risk.directed == want.directed, node
        assert risk.followed == want.followed, node
        assert risk.total == want.total, node
        assert demo_result.provenance[node] == expected.provenance[node], node


def test_oracle_matches_engine_on_seeded_batch():
    for seed in range(30):
        rng = random.Random(4200 + seed)
        g = build(random_document(rng, max_nodes=8, max_edges=14))
        fast = propagate(g)
        slow = oracle_propagate(g)
        for node in g.nodes_by_id:
            for lane in ("directed", "followed", "total"):
                a = getattr(fast.risks[node], lane)
                b = getattr(slow.risks[node], lane)
                assert all(
                    abs(x - y) <= 1e-9 for x, y in zip(a, b)
                ), f"seed {seed} {lane} {node}"


def test_oracle_cycle_example():
    result = oracle_propagate(cycle_pair())
    assert result.risks["A"].total.values == (0.6, 0.4, 0.0, 0.0)
    assert result.risks["A"].followed.values == (0.6, 0.4, 0.0, 0.0)
    assert result.risks["B"].followed.values == (0.6, 0.4, 0.0, 0.0)


# ---------------------------------------------------------------------------
# Step laws, small local sample (the acceptance suite runs the big one)


def test_step_laws_sample():
    for seed in range(20):
        rng = random.Random(9000 + seed)
        g = build(random_document(rng))
        result = propagate(g)
        d = g.schema.dimension
        for node, risk in result.risks.items():
            assert risk.total == max_per_aspect([risk.directed, risk.followed], d)
            if g.nodes_by_id[node].measured_risk is not None:
                assert risk.followed.is_zero()


def test_monotone_in_measured_risk():
    rng = random.Random(31)
    g = build(random_document(rng))
    before = propagate(g)
    measured = sorted(g.measured_ids)
    if not measured:
        pytest.skip("no measured nodes for this seed")
    target = g.nodes_by_id[measured[0]]
    raised = RiskVector([min(1.0, v + 0.3) for v in target.measured_risk])
    bumped = [
        type(target)(n.id, n.concept, raised if n.id == target.id else n.measured_risk)
        for n in g.nodes
    ]
    g2 = type(g)(g.schema, bumped, g.edges, g.concept_map)
    after = propagate(g2)
    for node in g.nodes_by_id:
        for x, y in zip(before.risks[node].total, after.risks[node].total):
            assert y >= x - 1e-9
