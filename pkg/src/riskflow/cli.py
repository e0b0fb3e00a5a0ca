"""Command-line surface: validate, propagate, assess, whatif, diff, serve.

Exit codes are part of the contract: 0 success, 1 validation or other domain
error, 2 usage error, 3 I/O error. In ``--format json`` mode stdout carries
exactly one JSON document, stable and byte-deterministic for identical
inputs; human-oriented notes go to stderr.
"""

from __future__ import annotations

import functools
import json
from enum import IntEnum
from pathlib import Path

import click

from .assessment import assess, diff_results, apply_mitigation, parse_action, top_k
from .errors import RiskflowError, UnknownReferenceError
from .ingest import document_to_graph, parse_document
from .model import validate_graph
from .propagation import PropagationResult, propagate
from .snapshots import SnapshotStore, result_from_json, result_to_json, write_bytes_atomic


class ExitStatus(IntEnum):
    OK = 0
    DOMAIN_ERROR = 1
    USAGE_ERROR = 2
    IO_ERROR = 3


def _mapped_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except RiskflowError as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(ExitStatus.DOMAIN_ERROR)
        except OSError as exc:
            click.echo(f"i/o error: {exc}", err=True)
            raise SystemExit(ExitStatus.IO_ERROR)

    return wrapper


def _emit_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


def _fmt(value: float) -> str:
    return format(value, ".6g")


def _fmt_vec(values) -> str:
    return "[" + ", ".join(_fmt(v) for v in values) + "]"


format_option = click.option(
    "--format",
    "output_format",
    type=click.Choice(["json", "table"]),
    default="table",
    show_default=True,
    help="json is the stable machine contract; table is for people.",
)
store_option = click.option(
    "--store",
    envvar="RISKFLOW_STORE",
    type=click.Path(file_okay=False),
    default=None,
    help="Snapshot store directory (defaults to $RISKFLOW_STORE).",
)
lenient_option = click.option(
    "--lenient",
    is_flag=True,
    help="Ignore unknown model fields instead of rejecting them.",
)


def _load_graph(model_path: str, lenient: bool):
    document = parse_document(Path(model_path).read_bytes(), lenient=lenient)
    return document, document_to_graph(document)


def _resolve_result(ref: str, store_path: str | None) -> PropagationResult:
    """A result reference is either a result file written by propagate --out
    or a snapshot id in the configured store."""
    path = Path(ref)
    if path.exists():
        return result_from_json(json.loads(path.read_text(encoding="utf-8")))
    if store_path:
        return SnapshotStore(store_path).load(ref).result
    raise UnknownReferenceError(
        f"{ref!r} is neither a result file nor (without a store configured) a snapshot id"
    )


@click.group()
def main() -> None:
    """Propagate measured risk through a process model and query the fallout."""


@main.command()
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@lenient_option
@format_option
@_mapped_errors
def validate(model: str, lenient: bool, output_format: str) -> None:
    """Check a model file and report every finding."""
    _, graph = _load_graph(model, lenient)
    report = validate_graph(graph)
    if output_format == "json":
        _emit_json(report.to_json())
    else:
        click.echo(f"{len(report.errors())} errors, {len(report.warnings())} warnings")
        for issue in report.issues:
            click.echo(str(issue))
    if not report.ok:
        raise SystemExit(ExitStatus.DOMAIN_ERROR)


@main.command(name="propagate")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the result document here (atomically).")
@click.option("--snapshot-store", "snapshot_store", envvar="RISKFLOW_STORE",
              type=click.Path(file_okay=False), default=None,
              help="Also save a snapshot to this store (defaults to $RISKFLOW_STORE).")
@click.option("--label", default=None, help="Label for the saved snapshot.")
@lenient_option
@format_option
@_mapped_errors
def propagate_cmd(
    model: str,
    out: str | None,
    snapshot_store: str | None,
    label: str | None,
    lenient: bool,
    output_format: str,
) -> None:
    """Run propagation over a model."""
    document, graph = _load_graph(model, lenient)
    result = propagate(graph)
    payload = result_to_json(result)

    snapshot_id = None
    if snapshot_store:
        snapshot_id = SnapshotStore(snapshot_store).save(document, result, label)

    if out:
        data = (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")
        write_bytes_atomic(Path(out), data)

    if output_format == "json":
        _emit_json(payload)
    else:
        click.echo(f"{'node':<28} {'concept':<16} total risk")
        for node, risk in result.risks.items():
            click.echo(f"{node:<28} {result.concepts[node]:<16} {_fmt_vec(risk.total)}")
        click.echo(
            f"perspectives: {', '.join(result.schema.names)}; "
            f"sweeps={result.stats.sweeps} relaxations={result.stats.relaxations}"
        )
    if out:
        click.echo(f"result written: {out}", err=True)
    if snapshot_id:
        click.echo(f"snapshot saved: {snapshot_id}", err=True)


def _parse_thresholds(pairs: tuple[str, ...]) -> dict[str, float]:
    thresholds = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep:
            raise click.UsageError(f"--threshold wants name=value, got {pair!r}")
        try:
            thresholds[name] = float(value)
        except ValueError:
            raise click.UsageError(f"--threshold value must be a number, got {pair!r}")
    return thresholds


@main.command(name="assess")
@click.argument("ref")
@click.option("--threshold", "thresholds", multiple=True,
              help="Cardinal risk threshold, e.g. --threshold availability=0.7.")
@click.option("--top-k", "k", type=int, default=None,
              help="Also rank the k riskiest nodes (needs --perspective).")
@click.option("--perspective", default=None, help="Perspective for the ranking.")
@click.option("--concept", default=None, help="Restrict the ranking to one concept.")
@store_option
@format_option
@_mapped_errors
def assess_cmd(
    ref: str,
    thresholds: tuple[str, ...],
    k: int | None,
    perspective: str | None,
    concept: str | None,
    store: str | None,
    output_format: str,
) -> None:
    """Alerts and rankings over a result file or snapshot id."""
    result = _resolve_result(ref, store)
    alerts = assess(result, _parse_thresholds(thresholds))
    ranking = None
    if k is not None:
        if perspective is None:
            raise click.UsageError("--top-k needs --perspective")
        ranking = top_k(result, k, perspective, concept)

    if output_format == "json":
        payload = {"alerts": [a.to_json() for a in alerts]}
        if ranking is not None:
            payload["ranking"] = [{"node": n, "value": v} for n, v in ranking]
        _emit_json(payload)
        return
    if not alerts:
        click.echo("no alerts")
    for a in alerts:
        click.echo(
            f"ALERT {a.node} {a.perspective}: {_fmt(a.value)} >= {_fmt(a.threshold)} "
            f"(margin {_fmt(a.margin)})"
        )
    if ranking is not None:
        click.echo(f"top {len(ranking)} by {perspective}" + (f" [{concept}]" if concept else ""))
        for n, v in ranking:
            click.echo(f"  {n:<28} {_fmt(v)}")


def _echo_delta_table(delta) -> None:
    moved = {
        node: triples
        for node, triples in delta.changes.items()
        if any(d != 0.0 for _, _, d in triples)
    }
    if not moved and not delta.before_only and not delta.after_only:
        click.echo("no change")
        return
    for node, triples in moved.items():
        for k, (before, after, d) in enumerate(triples):
            if d != 0.0:
                click.echo(
                    f"{node} {delta.perspectives[k]}: "
                    f"{_fmt(before)} -> {_fmt(after)} ({d:+.6g})"
                )
    for node, vec in delta.before_only.items():
        click.echo(f"{node}: removed (was {_fmt_vec(vec)})")
    for node, vec in delta.after_only.items():
        click.echo(f"{node}: added (now {_fmt_vec(vec)})")
    click.echo(f"max |delta| per perspective: {_fmt_vec(delta.max_abs_delta)}")


@main.command(name="whatif")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.option("--action", "actions", multiple=True, required=True,
              help="zero:<node> | risk:<node>=v,... | importance:<src>-><dst>#<label>=w,... "
                   "| remove-node:<node> | remove-edge:<src>-><dst>#<label>")
@click.option("--against", default=None,
              help="Diff against this snapshot instead of a fresh baseline run.")
@store_option
@lenient_option
@format_option
@_mapped_errors
def whatif_cmd(
    model: str,
    actions: tuple[str, ...],
    against: str | None,
    store: str | None,
    lenient: bool,
    output_format: str,
) -> None:
    """Apply mitigation actions, re-propagate, and report the movement."""
    _, graph = _load_graph(model, lenient)
    try:
        parsed = [parse_action(a) for a in actions]
    except ValueError as exc:
        raise click.UsageError(str(exc))

    if against:
        if not store:
            raise click.UsageError("--against needs a snapshot store (--store or $RISKFLOW_STORE)")
        baseline = SnapshotStore(store).load(against).result
    else:
        baseline = propagate(graph)
    edited = apply_mitigation(graph, parsed)
    delta = diff_results(baseline, propagate(edited))

    if output_format == "json":
        _emit_json(delta.to_json())
    else:
        _echo_delta_table(delta)


@main.command(name="diff")
@click.argument("id_a")
@click.argument("id_b")
@store_option
@format_option
@_mapped_errors
def diff_cmd(id_a: str, id_b: str, store: str | None, output_format: str) -> None:
    """Total-risk movement between two snapshots."""
    if not store:
        raise click.UsageError("diff needs a snapshot store (--store or $RISKFLOW_STORE)")
    delta = SnapshotStore(store).diff(id_a, id_b)
    if output_format == "json":
        _emit_json(delta.to_json())
    else:
        _echo_delta_table(delta)


@main.command(name="serve")
@store_option
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@_mapped_errors
def serve_cmd(store: str | None, host: str, port: int) -> None:
    """Run the HTTP service until interrupted."""
    import uvicorn

    from .service import create_app

    app = create_app(SnapshotStore(store) if store else None)
    uvicorn.run(app, host=host, port=port)
