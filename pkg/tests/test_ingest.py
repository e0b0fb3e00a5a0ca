import copy
import json

import pytest

from riskflow import (
    DocumentSyntaxError,
    ModelDocument,
    RiskflowWarning,
    SchemaError,
    ValidationError,
    document_from_json,
    document_to_graph,
    extract_records,
    graph_to_document,
    parse_document,
    parse_model,
    serialize_model,
)

MINIMAL = {
    "schema_version": "1",
    "perspectives": ["availability"],
    "relation_kinds": {"PartOf": "abstraction", "FollowedBy": "dependency"},
    "nodes": [
        {"id": "leaf", "concept": "Impact", "measured_risk": [0.5]},
        {"id": "step", "concept": "Activity"},
    ],
    "edges": [{"source": "leaf", "target": "step", "label": "PartOf"}],
}


def variant(mutate):
    payload = copy.deepcopy(MINIMAL)
    mutate(payload)
    return json.dumps(payload)


# ---------------------------------------------------------------------------
# Parsing


def test_parse_demo_document(demo_bytes):
    doc = parse_document(demo_bytes)
    assert doc.schema_version == "1"
    assert doc.perspectives == ("confidentiality", "integrity", "safety", "availability")
    assert {n.id for n in doc.nodes} >= {"asset-210", "DoorDisassembly", "VehicleAssembly"}


def test_malformed_json_reports_position():
    with pytest.raises(DocumentSyntaxError) as err:
        parse_document('{"schema_version": }')
    assert err.value.line == 1
    assert err.value.column == 20
    assert "line 1, column 20" in str(err.value)


def test_invalid_utf8_rejected():
    with pytest.raises(DocumentSyntaxError, match="UTF-8"):
        parse_document(b"\xff\xfe\x00")


def test_unknown_top_level_field_is_strict_by_default():
    with pytest.raises(SchemaError, match="unknown field.*'bogus'"):
        parse_document(variant(lambda d: d.update(bogus=1)))


def test_lenient_mode_downgrades_unknown_fields_to_warnings():
    with pytest.warns(RiskflowWarning, match="bogus"):
        doc = parse_document(variant(lambda d: d.update(bogus=1)), lenient=True)
    assert isinstance(doc, ModelDocument)


def test_unknown_node_field_positioned():
    with pytest.raises(SchemaError) as err:
        parse_document(variant(lambda d: d["nodes"][1].update(color="red")))
    assert err.value.location == "nodes[1]"


def test_missing_required_field():
    with pytest.raises(SchemaError, match="missing required field 'id'"):
        parse_document(variant(lambda d: d["nodes"][0].pop("id")))


def test_wrong_type_for_id():
    with pytest.raises(SchemaError, match="expected a string, got int"):
        parse_document(variant(lambda d: d["nodes"][0].update(id=7)))


def test_boolean_is_not_a_number():
    with pytest.raises(SchemaError, match="got bool"):
        parse_document(variant(lambda d: d["nodes"][0].update(measured_risk=[True])))


def test_unsupported_schema_version():
    with pytest.raises(SchemaError, match="unsupported version '2'"):
        parse_document(variant(lambda d: d.update(schema_version="2")))


def test_unknown_relation_kind_value():
    with pytest.raises(SchemaError, match="'sideways'"):
        parse_document(variant(lambda d: d["relation_kinds"].update(X="sideways")))


def test_edge_label_must_be_mapped():
    with pytest.raises(SchemaError, match="missing from relation_kinds"):
        parse_document(variant(lambda d: d["edges"][0].update(label="Zed")))


def test_empty_perspectives_rejected():
    with pytest.raises(SchemaError, match="perspectives"):
        parse_document(variant(lambda d: d.update(perspectives=[])))


def test_out_of_range_risk_reported_with_location():
    with pytest.raises(SchemaError) as err:
        parse_model(variant(lambda d: d["nodes"][0].update(measured_risk=[1.5])))
    assert err.value.location == "nodes[0].measured_risk"


def test_dimension_mismatch_fails_validation():
    with pytest.raises(ValidationError) as err:
        parse_model(variant(lambda d: d["edges"][0].update(importance=[0.5, 0.5])))
    assert any(i.code == "DimensionMismatch" for i in err.value.report.issues)


def test_parse_model_rejects_dangling_edges():
    with pytest.raises(ValidationError):
        parse_model(variant(lambda d: d["edges"][0].update(target="ghost")))


# ---------------------------------------------------------------------------
# Round-trips


def test_parse_serialize_identity(demo_graph):
    assert parse_model(serialize_model(demo_graph)) == demo_graph


def test_serialize_is_deterministic(demo_graph):
    assert serialize_model(demo_graph) == serialize_model(demo_graph)


def test_serialized_form_is_pretty_json(demo_graph):
    data = serialize_model(demo_graph)
    assert data.endswith(b"\n")
    payload = json.loads(data)
    assert payload["schema_version"] == "1"


def test_document_json_is_canonical(demo_document):
    # one pass through to_json materializes defaults; after that it is a fixpoint
    canonical = document_from_json(demo_document.to_json())
    assert document_from_json(canonical.to_json()) == canonical


def test_default_importance_becomes_all_ones():
    doc = parse_document(json.dumps(MINIMAL))
    graph = document_to_graph(doc)
    edge = graph.edge_for(("leaf", "step", "PartOf"))
    assert edge.importance.values == (1.0,)
    # and the canonical document spells it out
    assert doc.to_json()["edges"][0]["importance"] == [1.0]


def test_graph_document_round_trip(demo_graph):
    assert document_to_graph(graph_to_document(demo_graph)) == demo_graph


def test_exotic_floats_survive_round_trip():
    risky = variant(lambda d: d["nodes"][0].update(measured_risk=[0.1 + 0.2]))
    graph = parse_model(risky)
    again = parse_model(serialize_model(graph))
    value = again.nodes_by_id["leaf"].measured_risk[0]
    assert value == 0.1 + 0.2  # bit-exact, not approximately


# ---------------------------------------------------------------------------
# Records


def test_extract_records_sorted_and_complete(demo_graph):
    records = extract_records(demo_graph)
    keys = [(r.source, r.target, r.label) for r in records]
    assert keys == sorted(keys)
    assert len(records) == len(demo_graph.edges)
    by_key = {k: r for k, r in zip(keys, records)}
    rec = by_key[("imp-A", "asset-210", "CorrelatedTo")]
    assert rec.source_risk.values == (0.3, 0.85, 0.1, 0.2)
    assert rec.importance.values == (1.0, 1.0, 1.0, 1.0)


def test_extract_records_unmeasured_source_has_no_risk(demo_graph):
    records = extract_records(demo_graph)
    rec = next(r for r in records if r.source == "DoorDisassembly")
    assert rec.source_risk is None
