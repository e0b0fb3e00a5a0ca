#!/usr/bin/env python3
"""Record live service responses as JSON fixtures for the frontend tests.

Runs the demo model through the HTTP layer (in-process TestClient, real
routing and serialization) and freezes the payloads the UI is tested
against. Re-run after changing the service contract:

    python3 scripts/record_ui_fixtures.py
"""

import json
import tempfile
from datetime import datetime, timedelta, timezone
from pathlib import Path

from fastapi.testclient import TestClient

from riskflow import SnapshotStore, parse_action
from riskflow.service import create_app

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "frontend" / "test" / "fixtures"


def actions_payload(*texts, version=None):
    payload = {"actions": [parse_action(t).to_json() for t in texts]}
    if version is not None:
        payload["version"] = version
    return payload


def main() -> None:
    demo = Path(__file__).resolve().parent.parent / (
        "src/riskflow/data/demo_vehicle_assembly.json"
    )
    model = json.loads(demo.read_text())

    base = datetime(2026, 8, 16, 12, 0, tzinfo=timezone.utc)
    beats = iter(base + timedelta(minutes=i) for i in range(100))
    store = SnapshotStore(
        Path(tempfile.mkdtemp()) / "snaps", clock=lambda: next(beats)
    )

    recorded: dict[str, dict] = {}
    with TestClient(create_app(store=store)) as client:
        assert client.put("/models/demo", json=model).status_code == 200

        recorded["graph"] = client.get("/models/demo/graph").json()
        recorded["propagate"] = client.post("/models/demo/propagate").json()
        recorded["assess"] = client.get(
            "/models/demo/assess?threshold.availability=0.7"
        ).json()
        recorded["root_causes_dashboard"] = client.get(
            "/models/demo/nodes/DashboardInstallation/root-causes"
        ).json()

        recorded["whatif_zero_imp_c"] = client.post(
            "/models/demo/whatif", json=actions_payload("zero:imp-C")
        ).json()
        recorded["whatif_zero_imp_g"] = client.post(
            "/models/demo/whatif", json=actions_payload("zero:imp-G")
        ).json()
        recorded["whatif_zero_both"] = client.post(
            "/models/demo/whatif", json=actions_payload("zero:imp-G", "zero:imp-C")
        ).json()

        before = client.post(
            "/models/demo/propagate?snapshot=true&label=before"
        ).json()["snapshot_id"]
        assert (
            client.post(
                "/models/demo/whatif/commit",
                json=actions_payload("zero:imp-C", version=1),
            ).status_code
            == 200
        )
        after = client.post(
            "/models/demo/propagate?snapshot=true&label=after"
        ).json()["snapshot_id"]

        recorded["snapshots"] = client.get("/snapshots").json()
        recorded["snapshot_before"] = client.get(f"/snapshots/{before}").json()
        recorded["snapshot_after"] = client.get(f"/snapshots/{after}").json()
        recorded["snapshot_diff"] = client.get(
            f"/snapshots/{before}/diff/{after}"
        ).json()

    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    for name, payload in recorded.items():
        path = FIXTURE_DIR / f"{name}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path.relative_to(FIXTURE_DIR.parent.parent)}")


if __name__ == "__main__":
    main()
