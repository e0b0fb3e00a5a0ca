import json
from datetime import datetime, timedelta, timezone

import pytest

from riskflow import (
    SnapshotNotFoundError,
    SnapshotStore,
    StorageError,
    apply_mitigation,
    diff_snapshots,
    document_to_graph,
    parse_action,
    propagate,
    result_from_json,
    result_to_json,
    snapshot_id_for,
)
from riskflow.snapshots import write_bytes_atomic


@pytest.fixture
def store(tmp_path):
    return SnapshotStore(tmp_path / "snaps")


@pytest.fixture
def ticking_store(tmp_path):
    base = datetime(2026, 8, 16, 12, 0, tzinfo=timezone.utc)
    beats = iter(base + timedelta(minutes=i) for i in range(100))
    return SnapshotStore(tmp_path / "snaps", clock=lambda: next(beats))


# ---------------------------------------------------------------------------
# Result payloads


def test_result_round_trip_is_exact(demo_result):
    again = result_from_json(result_to_json(demo_result))
    assert again.schema == demo_result.schema
    assert again.risks == demo_result.risks
    assert again.provenance == demo_result.provenance
    assert again.concepts == demo_result.concepts


def test_result_payload_is_plain_json(demo_result):
    payload = result_to_json(demo_result)
    json.dumps(payload)  # must not need a custom encoder
    assert set(payload) == {"perspectives", "nodes", "provenance", "concepts", "stats"}


def test_result_from_json_rejects_garbage():
    with pytest.raises(StorageError):
        result_from_json({"nodes": "nope"})


# ---------------------------------------------------------------------------
# Identity


def test_id_depends_only_on_content(demo_document, demo_result, ticking_store, store):
    a = ticking_store.save(demo_document, demo_result, label="first")
    b = store.save(demo_document, demo_result, label="renamed later")
    assert a == b == snapshot_id_for(demo_document, demo_result)
    assert len(a) == 64 and all(c in "0123456789abcdef" for c in a)


def test_saving_twice_is_idempotent(demo_document, demo_result, store):
    first = store.save(demo_document, demo_result)
    second = store.save(demo_document, demo_result, label="again")
    assert first == second
    assert len(store.list()) == 1


def test_id_changes_with_result(demo_document, demo_graph, demo_result, store):
    g2 = apply_mitigation(demo_graph, [parse_action("zero:imp-C")])
    other = store.save(demo_document, propagate(g2))
    assert other != store.save(demo_document, demo_result)


# ---------------------------------------------------------------------------
# Store behaviour


def test_load_round_trip(demo_document, demo_result, ticking_store):
    sid = ticking_store.save(demo_document, demo_result, label="baseline")
    snap = ticking_store.load(sid)
    assert snap.id == sid
    assert snap.label == "baseline"
    assert snap.created_at == "2026-08-16T12:00:00+00:00"
    # the stored model is the canonical form: defaults spelled out
    assert document_to_graph(snap.model) == document_to_graph(demo_document)
    assert snap.result.risks == demo_result.risks


def test_load_unknown_id(store):
    with pytest.raises(SnapshotNotFoundError):
        store.load("0" * 64)


def test_tampered_snapshot_detected(demo_document, demo_result, store, tmp_path):
    sid = store.save(demo_document, demo_result)
    path = tmp_path / "snaps" / "snapshots" / f"{sid}.json"
    payload = json.loads(path.read_text())
    payload["result"]["nodes"]["imp-C"]["tr"] = [0.0, 0.0, 0.0, 0.0]
    path.write_text(json.dumps(payload))
    with pytest.raises(StorageError, match="modified after saving"):
        store.load(sid)


def test_corrupt_index_reported(demo_document, demo_result, store, tmp_path):
    store.save(demo_document, demo_result)
    index = next((tmp_path / "snaps").glob("*index*"))
    index.write_text("{truncated\n")
    with pytest.raises(StorageError):
        store.list()


def test_list_orders_and_filters(demo_document, demo_graph, demo_result, ticking_store):
    first = ticking_store.save(demo_document, demo_result, label="t0")
    g2 = apply_mitigation(demo_graph, [parse_action("zero:imp-C")])
    second = ticking_store.save(demo_document, propagate(g2), label="t1")
    infos = ticking_store.list()
    assert [i.id for i in infos] == [first, second]
    assert [i.label for i in infos] == ["t0", "t1"]

    only_second = ticking_store.list(since="2026-08-16T12:01:00+00:00")
    assert [i.id for i in only_second] == [second]
    only_first = ticking_store.list(until="2026-08-16T12:00:00+00:00")
    assert [i.id for i in only_first] == [first]
    assert ticking_store.list(since="2027-01-01T00:00:00+00:00") == []


def test_diff_between_snapshots(demo_document, demo_graph, demo_result, store):
    before = store.save(demo_document, demo_result)
    g2 = apply_mitigation(demo_graph, [parse_action("zero:imp-C")])
    after = store.save(demo_document, propagate(g2))
    delta = store.diff(before, after)
    assert delta.max_abs_delta[3] == pytest.approx(0.9)
    assert diff_snapshots(store, before, after).changes == delta.changes


def test_vectors_survive_storage_bit_exact(demo_document, demo_graph, store):
    result = propagate(demo_graph)
    sid = store.save(demo_document, result)
    loaded = store.load(sid).result
    for node, risk in result.risks.items():
        assert loaded.risks[node].total.values == risk.total.values
        assert loaded.risks[node].followed.values == risk.followed.values


# ---------------------------------------------------------------------------
# Filesystem primitives


def test_write_bytes_atomic(tmp_path):
    target = tmp_path / "out.json"
    write_bytes_atomic(target, b"one")
    write_bytes_atomic(target, b"two")
    assert target.read_bytes() == b"two"
    assert list(tmp_path.iterdir()) == [target]  # no stray temp files
