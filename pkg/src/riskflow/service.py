"""Embedded HTTP service: the engine behind the analyst UI.

A session holds one uploaded model per model id plus the committed what-if
action stack; every propagation request recomputes from the session's
current model, so there is nothing to go stale. Commits use optimistic
concurrency: each response carries a version counter and a commit must quote
the version it saw, or it bounces with 409 and the model stays untouched.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from typing import Sequence

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .assessment import (
    MitigationAction,
    action_from_json,
    apply_mitigation,
    assess,
    diff_results,
    root_causes,
    top_k,
)
from .errors import (
    ActionWouldInvalidateError,
    RiskflowError,
    SnapshotNotFoundError,
    StorageError,
    ValidationError,
)
from .ingest import ModelDocument, document_from_json, document_to_graph, graph_to_document
from .model import RiskGraph, validate_graph
from .propagation import propagate
from .snapshots import SnapshotStore, result_to_json


@dataclass
class Session:
    """One uploaded model and its committed what-if history."""

    base_document: ModelDocument
    document: ModelDocument
    graph: RiskGraph
    version: int
    actions: list[MitigationAction] = field(default_factory=list)


def _status_for(exc: RiskflowError) -> int:
    if isinstance(exc, SnapshotNotFoundError):
        return 404
    if isinstance(exc, StorageError):
        return 500
    return 400


def create_app(
    store: SnapshotStore | None = None,
    cors_origins: Sequence[str] = ("*",),
) -> FastAPI:
    app = FastAPI(title="riskflow", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    app.state.sessions = sessions
    app.state.store = store

    @app.exception_handler(RiskflowError)
    async def riskflow_error(request: Request, exc: RiskflowError) -> JSONResponse:
        body: dict = {"detail": str(exc)}
        if isinstance(exc, (ValidationError, ActionWouldInvalidateError)):
            body["report"] = exc.report.to_json()
        return JSONResponse(status_code=_status_for(exc), content=body)

    async def read_json(request: Request):
        try:
            return json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise HTTPException(400, f"request body is not valid JSON: {exc.msg}")

    def get_session(model_id: str) -> Session:
        session = sessions.get(model_id)
        if session is None:
            raise HTTPException(404, f"no model {model_id!r}")
        return session

    def require_store() -> SnapshotStore:
        if store is None:
            raise StorageError("no snapshot store configured")
        return store

    # -- model lifecycle ----------------------------------------------------

    @app.put("/models/{model_id}")
    async def put_model(model_id: str, request: Request):
        payload = await read_json(request)
        document = document_from_json(payload)
        graph = document_to_graph(document)
        report = validate_graph(graph)
        if not report.ok:
            raise ValidationError(report)
        with registry_lock:
            previous = sessions.get(model_id)
            version = (previous.version + 1) if previous else 1
            sessions[model_id] = Session(
                base_document=document, document=document, graph=graph, version=version
            )
        return {"version": version, "report": report.to_json()}

    @app.get("/models/{model_id}/graph")
    async def get_graph(model_id: str):
        session = get_session(model_id)
        graph = session.graph
        return {
            "version": session.version,
            "perspectives": list(graph.schema.names),
            "relation_kinds": {
                label: kind.value for label, kind in sorted(graph.concept_map.items())
            },
            "nodes": [
                {
                    "id": n.id,
                    "concept": n.concept,
                    "measured_risk": None if n.measured_risk is None else n.measured_risk.as_list(),
                }
                for n in graph.nodes
            ],
            "edges": [
                {
                    "source": e.source,
                    "target": e.target,
                    "label": e.label,
                    "kind": e.kind.value,
                    "importance": e.importance.as_list(),
                }
                for e in graph.edges
            ],
        }

    # -- computation --------------------------------------------------------

    @app.post("/models/{model_id}/propagate")
    async def post_propagate(model_id: str, snapshot: bool = False, label: str | None = None):
        session = get_session(model_id)
        result = propagate(session.graph)
        snapshot_id = None
        if snapshot:
            snapshot_id = require_store().save(session.document, result, label)
        payload = result_to_json(result)
        payload["version"] = session.version
        payload["snapshot_id"] = snapshot_id
        return payload

    @app.get("/models/{model_id}/assess")
    async def get_assess(model_id: str, request: Request):
        session = get_session(model_id)
        thresholds: dict[str, float] = {}
        params = request.query_params
        for key, raw in params.items():
            if key.startswith("threshold."):
                try:
                    thresholds[key[len("threshold."):]] = float(raw)
                except ValueError:
                    raise HTTPException(400, f"threshold {key!r} is not a number: {raw!r}")
        result = propagate(session.graph)
        body: dict = {
            "version": session.version,
            "alerts": [a.to_json() for a in assess(result, thresholds)],
        }
        if "top_k" in params:
            perspective = params.get("perspective")
            if not perspective:
                raise HTTPException(400, "top_k needs perspective=<name>")
            try:
                k = int(params["top_k"])
                ranking = top_k(result, k, perspective, params.get("concept"))
            except ValueError as exc:
                raise HTTPException(400, str(exc))
            body["ranking"] = [{"node": n, "value": v} for n, v in ranking]
        return body

    @app.get("/models/{model_id}/nodes/{node_id}/root-causes")
    async def get_root_causes(model_id: str, node_id: str, perspective: str | None = None):
        session = get_session(model_id)
        result = propagate(session.graph)
        if node_id not in result.risks:
            raise HTTPException(404, f"no node {node_id!r} in model {model_id!r}")
        if perspective is not None:
            causes = root_causes(result, node_id, perspective)
            return {
                "version": session.version,
                "node": node_id,
                "causes": {perspective: [c.to_json() for c in causes]},
            }
        return {
            "version": session.version,
            "node": node_id,
            "causes": {
                name: [c.to_json() for c in root_causes(result, node_id, name)]
                for name in result.schema.names
            },
        }

    # -- what-if loop -------------------------------------------------------

    def parse_actions(payload) -> list[MitigationAction]:
        if not isinstance(payload, dict) or not isinstance(payload.get("actions"), list):
            raise HTTPException(400, 'body must be {"actions": [...]}')
        try:
            return [action_from_json(a) for a in payload["actions"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise HTTPException(400, f"bad action: {exc}")

    @app.post("/models/{model_id}/whatif")
    async def post_whatif(model_id: str, request: Request):
        session = get_session(model_id)
        actions = parse_actions(await read_json(request))
        baseline = propagate(session.graph)
        edited = apply_mitigation(session.graph, actions)
        result = propagate(edited)
        delta = diff_results(baseline, result)
        return {
            "version": session.version,
            "result": result_to_json(result),
            "delta": delta.to_json(),
        }

    @app.post("/models/{model_id}/whatif/commit")
    async def post_commit(model_id: str, request: Request):
        payload = await read_json(request)
        actions = parse_actions(payload)
        if "version" not in payload:
            raise HTTPException(400, "commit needs the version the actions were built against")
        with registry_lock:
            session = get_session(model_id)
            if payload["version"] != session.version:
                raise HTTPException(
                    409,
                    f"model {model_id!r} is at version {session.version}, "
                    f"commit was built against {payload['version']}",
                )
            edited = apply_mitigation(session.graph, actions)
            session.graph = edited
            session.document = graph_to_document(edited)
            session.actions.extend(actions)
            session.version += 1
            return {"version": session.version, "applied": len(actions)}

    # -- snapshots ----------------------------------------------------------

    @app.get("/snapshots")
    async def list_snapshots(since: str | None = None, until: str | None = None):
        if store is None:
            return {"snapshots": []}
        try:
            infos = store.list(since, until)
        except ValueError as exc:
            raise HTTPException(400, f"bad time bound: {exc}")
        return {
            "snapshots": [
                {"id": i.id, "created_at": i.created_at, "label": i.label} for i in infos
            ]
        }

    @app.get("/snapshots/{snapshot_id}")
    async def get_snapshot(snapshot_id: str):
        snapshot = require_store().load(snapshot_id)
        return {
            "id": snapshot.id,
            "created_at": snapshot.created_at,
            "label": snapshot.label,
            "model": snapshot.model.to_json(),
            "result": result_to_json(snapshot.result),
        }

    @app.get("/snapshots/{id_a}/diff/{id_b}")
    async def diff_snapshots(id_a: str, id_b: str):
        return require_store().diff(id_a, id_b).to_json()

    return app
