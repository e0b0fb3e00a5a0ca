"""Timestamped, content-addressed persistence of propagation runs.

A store is a plain directory: one self-contained JSON file per snapshot plus
a newline-delimited index, inspectable and diffable without tooling. The
snapshot id is a hash of the model and result content, so saving the same
run twice is a no-op; the store stamps creation time itself to keep the
timeline trustworthy. Floats survive round-trips bit-exactly (JSON carries
their shortest full-precision decimal form).

Writers take an exclusive store-level lock; readers touch only immutable
files and need none.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from filelock import FileLock

from .assessment import RiskDelta, diff_results
from .errors import SnapshotNotFoundError, StorageError
from .ingest import ModelDocument, document_from_json
from .model import PerspectiveSchema, RiskVector
from .propagation import (
    NodeRisk,
    PropagationResult,
    PropagationStats,
    ProvenanceEntry,
)


def write_bytes_atomic(path: Path, data: bytes) -> None:
    """Write via a sibling temp file and rename, so readers never observe a
    half-written file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# ---------------------------------------------------------------------------
# Result (de)serialization

def result_to_json(result: PropagationResult) -> dict:
    """JSON form of a result: per node the dr/fr/tr arrays, plus provenance
    witness lists (sorted for determinism), concepts, and run stats."""
    return {
        "perspectives": list(result.schema.names),
        "nodes": {
            node: {
                "dr": risk.directed.as_list(),
                "fr": risk.followed.as_list(),
                "tr": risk.total.as_list(),
            }
            for node, risk in result.risks.items()
        },
        "provenance": {
            node: [
                [
                    {"leaf": entry.leaf, "path": [list(ref) for ref in entry.path]}
                    for entry in sorted(entries, key=lambda w: (w.leaf, w.path))
                ]
                for entries in per_perspective
            ]
            for node, per_perspective in result.provenance.items()
        },
        "concepts": dict(result.concepts),
        "stats": {
            "nodes": result.stats.nodes,
            "sweeps": result.stats.sweeps,
            "relaxations": result.stats.relaxations,
            "visited": result.stats.visited,
        },
    }


def result_from_json(payload: dict) -> PropagationResult:
    try:
        schema = PerspectiveSchema(payload["perspectives"])
        risks = {
            node: NodeRisk(
                directed=RiskVector(entry["dr"]),
                followed=RiskVector(entry["fr"]),
                total=RiskVector(entry["tr"]),
            )
            for node, entry in payload["nodes"].items()
        }
        provenance = {
            node: tuple(
                frozenset(
                    ProvenanceEntry(
                        leaf=w["leaf"],
                        path=tuple(tuple(ref) for ref in w["path"]),
                    )
                    for w in entries
                )
                for entries in per_perspective
            )
            for node, per_perspective in payload["provenance"].items()
        }
        stats = payload["stats"]
        return PropagationResult(
            schema=schema,
            risks=risks,
            provenance=provenance,
            concepts=dict(payload["concepts"]),
            stats=PropagationStats(
                nodes=stats["nodes"],
                sweeps=stats["sweeps"],
                relaxations=stats["relaxations"],
                visited=stats["visited"],
            ),
        )
    except (AttributeError, KeyError, TypeError, ValueError) as exc:
        raise StorageError(f"malformed result payload: {exc}") from exc


# ---------------------------------------------------------------------------
# Snapshots

@dataclass(frozen=True)
class Snapshot:
    id: str
    created_at: str
    label: str | None
    model: ModelDocument
    result: PropagationResult


@dataclass(frozen=True)
class SnapshotInfo:
    id: str
    created_at: str
    label: str | None


def _canonical(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def snapshot_id_for(model: ModelDocument, result: PropagationResult) -> str:
    """Deterministic id: hash of the canonical model and result content.
    Label and timestamp deliberately excluded."""
    content = {"model": model.to_json(), "result": result_to_json(result)}
    return hashlib.sha256(_canonical(content)).hexdigest()


class SnapshotStore:
    """Directory-backed append-only snapshot store.

    ``clock`` exists for tests; real use stamps UTC now.
    """

    def __init__(self, root: str | Path, clock: Callable[[], datetime] | None = None):
        self.root = Path(root)
        self._clock = clock or (lambda: datetime.now(timezone.utc))
        self._lock = FileLock(str(self.root / ".lock"))

    @property
    def _index_path(self) -> Path:
        return self.root / "index.ndjson"

    def _snapshot_path(self, snapshot_id: str) -> Path:
        return self.root / "snapshots" / f"{snapshot_id}.json"

    def save(
        self,
        model: ModelDocument,
        result: PropagationResult,
        label: str | None = None,
    ) -> str:
        """Persist one run; returns its id. Saving identical content again
        returns the existing id and writes nothing."""
        snapshot_id = snapshot_id_for(model, result)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            (self.root / "snapshots").mkdir(exist_ok=True)
            with self._lock:
                path = self._snapshot_path(snapshot_id)
                if path.exists():
                    return snapshot_id
                created_at = self._clock().isoformat()
                payload = {
                    "id": snapshot_id,
                    "created_at": created_at,
                    "label": label,
                    "model": model.to_json(),
                    "result": result_to_json(result),
                }
                write_bytes_atomic(
                    path, (json.dumps(payload, indent=2) + "\n").encode("utf-8")
                )
                line = json.dumps(
                    {"id": snapshot_id, "created_at": created_at, "label": label}
                )
                with open(self._index_path, "a", encoding="utf-8") as index:
                    index.write(line + "\n")
        except OSError as exc:
            raise StorageError(f"cannot write snapshot: {exc}") from exc
        return snapshot_id

    def load(self, snapshot_id: str) -> Snapshot:
        """Read one snapshot back, verifying its content still hashes to its id."""
        path = self._snapshot_path(snapshot_id)
        try:
            raw = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise SnapshotNotFoundError(f"no snapshot {snapshot_id!r}") from None
        except OSError as exc:
            raise StorageError(f"cannot read snapshot {snapshot_id!r}: {exc}") from exc
        try:
            payload = json.loads(raw)
            model = document_from_json(payload["model"])
            result = result_from_json(payload["result"])
            snapshot = Snapshot(
                id=payload["id"],
                created_at=payload["created_at"],
                label=payload["label"],
                model=model,
                result=result,
            )
        except StorageError:
            raise
        except Exception as exc:
            raise StorageError(f"snapshot {snapshot_id!r} is corrupt: {exc}") from exc
        recomputed = snapshot_id_for(model, result)
        if recomputed != snapshot_id:
            raise StorageError(
                f"snapshot {snapshot_id!r} content hashes to {recomputed!r}; "
                "the file was modified after saving"
            )
        return snapshot

    def list(
        self,
        since: str | datetime | None = None,
        until: str | datetime | None = None,
    ) -> list[SnapshotInfo]:
        """Index entries sorted by creation time (inclusive range bounds)."""
        lo = _range_bound(since)
        hi = _range_bound(until)
        if not self._index_path.exists():
            return []
        infos = []
        try:
            with open(self._index_path, encoding="utf-8") as index:
                for line in index:
                    line = line.strip()
                    if not line:
                        continue
                    entry = json.loads(line)
                    infos.append(
                        SnapshotInfo(entry["id"], entry["created_at"], entry["label"])
                    )
        except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
            raise StorageError(f"snapshot index is corrupt: {exc}") from exc
        infos = [
            info
            for info in infos
            if (lo is None or datetime.fromisoformat(info.created_at) >= lo)
            and (hi is None or datetime.fromisoformat(info.created_at) <= hi)
        ]
        infos.sort(key=lambda info: (info.created_at, info.id))
        return infos

    def diff(self, id_a: str, id_b: str) -> RiskDelta:
        """Total-risk movement from snapshot a to snapshot b."""
        return diff_results(self.load(id_a).result, self.load(id_b).result)


def _range_bound(value: str | datetime | None) -> datetime | None:
    if value is None:
        return None
    if isinstance(value, datetime):
        return value
    return datetime.fromisoformat(value)


# Free-function forms, for symmetry with the rest of the API.

def save_snapshot(
    store: SnapshotStore,
    model: ModelDocument,
    result: PropagationResult,
    label: str | None = None,
) -> str:
    return store.save(model, result, label)


def load_snapshot(store: SnapshotStore, snapshot_id: str) -> Snapshot:
    return store.load(snapshot_id)


def list_snapshots(
    store: SnapshotStore,
    since: str | datetime | None = None,
    until: str | datetime | None = None,
) -> list[SnapshotInfo]:
    return store.list(since, until)


def diff_snapshots(store: SnapshotStore, id_a: str, id_b: str) -> RiskDelta:
    return store.diff(id_a, id_b)
