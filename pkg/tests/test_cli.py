import json

import pytest
from click.testing import CliRunner

from riskflow import result_from_json
from riskflow.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workspace(tmp_path, demo_path):
    return {
        "model": str(demo_path),
        "out": str(tmp_path / "result.json"),
        "store": str(tmp_path / "store"),
    }


def propagated(runner, ws, extra=()):
    args = ["propagate", ws["model"], "--out", ws["out"], *extra]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    return result


# ---------------------------------------------------------------------------
# validate


def test_validate_demo(runner, workspace):
    result = runner.invoke(main, ["validate", workspace["model"]])
    assert result.exit_code == 0
    assert result.stdout.startswith("0 errors, 2 warnings")
    assert "UnreachableFromMeasured" in result.stdout


def test_validate_json_mode(runner, workspace):
    result = runner.invoke(main, ["validate", workspace["model"], "--format", "json"])
    payload = json.loads(result.stdout)
    assert payload["ok"] is True


def test_validate_rejects_broken_model(runner, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"schema_version": "1"')
    result = runner.invoke(main, ["validate", str(path)])
    assert result.exit_code == 1
    assert result.stderr.startswith("error: line 1")


def test_missing_file_is_a_usage_error(runner, tmp_path):
    result = runner.invoke(main, ["validate", str(tmp_path / "nope.json")])
    assert result.exit_code == 2


# ---------------------------------------------------------------------------
# propagate


def test_propagate_writes_reloadable_result(runner, workspace):
    propagated(runner, workspace)
    payload = json.loads(open(workspace["out"]).read())
    result = result_from_json(payload)
    assert result.risks["DashboardInstallation"].total[3] == 0.9


def test_propagate_json_stdout_round_trips(runner, workspace):
    result = runner.invoke(main, ["propagate", workspace["model"], "--format", "json"])
    assert result.exit_code == 0
    reparsed = result_from_json(json.loads(result.stdout))
    assert reparsed.stats.nodes == 16


def test_propagate_json_is_byte_deterministic(runner, workspace):
    args = ["propagate", workspace["model"], "--format", "json"]
    assert runner.invoke(main, args).stdout == runner.invoke(main, args).stdout


def test_propagate_table_mentions_stats(runner, workspace):
    result = runner.invoke(main, ["propagate", workspace["model"]])
    assert result.exit_code == 0
    assert "DoorDisassembly" in result.stdout
    assert "sweeps" in result.stdout


def test_propagate_saves_snapshot(runner, workspace):
    result = propagated(
        runner, workspace, ["--snapshot-store", workspace["store"], "--label", "t0"]
    )
    assert "snapshot saved:" in result.stderr
    sid = result.stderr.split("snapshot saved:")[1].strip()
    assert len(sid) == 64


def test_propagate_rejects_invalid_graph(runner, tmp_path):
    path = tmp_path / "invalid.json"
    path.write_text(
        json.dumps(
            {
                "schema_version": "1",
                "perspectives": ["a"],
                "relation_kinds": {"X": "dependency"},
                "nodes": [{"id": "n", "concept": "Thing"}],
                "edges": [{"source": "n", "target": "ghost", "label": "X"}],
            }
        )
    )
    result = runner.invoke(main, ["propagate", str(path)])
    assert result.exit_code == 1
    assert "DanglingEndpoint" in result.stderr


# ---------------------------------------------------------------------------
# assess


def test_assess_result_file(runner, workspace):
    propagated(runner, workspace)
    result = runner.invoke(
        main, ["assess", workspace["out"], "--threshold", "availability=0.7"]
    )
    assert result.exit_code == 0
    assert "ALERT DashboardInstallation availability" in result.stdout


def test_assess_snapshot_ref(runner, workspace):
    stderr = propagated(
        runner, workspace, ["--snapshot-store", workspace["store"]]
    ).stderr
    sid = stderr.split("snapshot saved:")[1].strip()
    result = runner.invoke(
        main,
        ["assess", sid, "--threshold", "availability=0.7"],
        env={"RISKFLOW_STORE": workspace["store"]},
    )
    assert result.exit_code == 0
    assert "ALERT" in result.stdout


def test_assess_json_with_ranking(runner, workspace):
    propagated(runner, workspace)
    result = runner.invoke(
        main,
        [
            "assess", workspace["out"],
            "--threshold", "availability=0.7",
            "--top-k", "3",
            "--perspective", "availability",
            "--concept", "ProcessElement",
            "--format", "json",
        ],
    )
    payload = json.loads(result.stdout)
    assert [r["node"] for r in payload["ranking"]] == [
        "DashboardInstallation",
        "DoorDisassembly",
        "VehicleAssembly",
    ]
    assert all(a["value"] >= 0.7 for a in payload["alerts"])


def test_assess_threshold_syntax_checked(runner, workspace):
    propagated(runner, workspace)
    result = runner.invoke(main, ["assess", workspace["out"], "--threshold", "availability"])
    assert result.exit_code == 2
    assert "name=value" in result.stderr


def test_assess_wrong_payload_is_domain_error(runner, workspace):
    result = runner.invoke(
        main, ["assess", workspace["model"], "--threshold", "availability=0.7"]
    )
    assert result.exit_code == 1
    assert result.stderr.startswith("error:")


# ---------------------------------------------------------------------------
# whatif / diff


def test_whatif_table_shows_moved_rows(runner, workspace):
    result = runner.invoke(
        main, ["whatif", workspace["model"], "--action", "zero:imp-C"]
    )
    assert result.exit_code == 0
    assert "DoorDisassembly availability: 0.9 -> 0.8" in result.stdout
    assert "confidentiality" not in result.stdout  # unchanged perspective stays quiet


def test_whatif_json_delta(runner, workspace):
    result = runner.invoke(
        main,
        ["whatif", workspace["model"], "--action", "zero:imp-C", "--format", "json"],
    )
    payload = json.loads(result.stdout)
    assert payload["max_abs_delta"] == [0.0, 0.1, 0.7, 0.9]
    assert payload["changes"]["imp-C"]


def test_whatif_multiple_actions_in_order(runner, workspace):
    result = runner.invoke(
        main,
        [
            "whatif", workspace["model"],
            "--action", "risk:imp-C=1,1,1,1",
            "--action", "zero:imp-C",
            "--format", "json",
        ],
    )
    payload = json.loads(result.stdout)
    assert payload["max_abs_delta"] == [0.0, 0.1, 0.7, 0.9]


def test_whatif_bad_action_is_usage_error(runner, workspace):
    result = runner.invoke(
        main, ["whatif", workspace["model"], "--action", "explode:imp-C"]
    )
    assert result.exit_code == 2
    assert "unknown action kind" in result.stderr


def test_whatif_against_snapshot(runner, workspace):
    stderr = propagated(
        runner, workspace, ["--snapshot-store", workspace["store"]]
    ).stderr
    sid = stderr.split("snapshot saved:")[1].strip()
    result = runner.invoke(
        main,
        [
            "whatif", workspace["model"],
            "--action", "zero:imp-C",
            "--against", sid,
            "--format", "json",
        ],
        env={"RISKFLOW_STORE": workspace["store"]},
    )
    assert result.exit_code == 0
    assert json.loads(result.stdout)["max_abs_delta"][3] == 0.9


def test_diff_needs_a_store(runner):
    result = runner.invoke(main, ["diff", "a" * 64, "b" * 64])
    assert result.exit_code == 2
    assert "snapshot store" in result.stderr


def test_diff_same_snapshot_reports_no_change(runner, workspace):
    stderr = propagated(
        runner, workspace, ["--snapshot-store", workspace["store"]]
    ).stderr
    sid = stderr.split("snapshot saved:")[1].strip()
    result = runner.invoke(
        main, ["diff", sid, sid], env={"RISKFLOW_STORE": workspace["store"]}
    )
    assert result.exit_code == 0
    assert result.stdout.strip() == "no change"


def test_diff_unknown_snapshot(runner, workspace):
    propagated(runner, workspace, ["--snapshot-store", workspace["store"]])
    result = runner.invoke(
        main,
        ["diff", "0" * 64, "1" * 64],
        env={"RISKFLOW_STORE": workspace["store"]},
    )
    assert result.exit_code == 1


# ---------------------------------------------------------------------------
# serve


def test_serve_is_wired_up(runner):
    result = runner.invoke(main, ["serve", "--help"])
    assert result.exit_code == 0
    assert "--port" in result.output
