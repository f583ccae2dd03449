"""Command-line entry point.

Exit codes (total mapping from error classes):
    0  success
    2  usage error (bad flags, unknown list target)
    3  dialogue phase failure (tag never produced, validation failed twice)
    4  model adapter failure (server unreachable, bad model reference)
    5  I/O or parse failure (missing files, corrupt manifests/transcripts)
    6  version mismatch or replay divergence
    1  anything else

Config precedence: flags > config file (--config, JSON) > environment
variables (DRIFTAUDIT_<FLAG>). The remote-backend credential is read only
from the environment.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
from pathlib import Path

import click

from .audit import (
    AuditPlan,
    results_markdown,
    run_audit,
    write_results_csv,
)
from .errors import (
    AdapterError,
    DriftAuditError,
    ParseError,
    PhaseFailure,
    SchemaError,
    VersionError,
)
from .io import load_dataset, make_adapter
from .metrics import ALL_METRICS
from .orchestrator import (
    CannedDriver,
    DebateTranscript,
    InteractiveDriver,
    ReplayDriver,
    ScriptedBackend,
    load_answers_file,
    load_transcript,
    make_backend,
    run_analysis_phase,
    run_metric_phase,
    run_shift_phase,
    save_transcript,
)
from .report import render_report, serialize_pipeline
from .shifts import catalogue

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PHASE = 3
EXIT_ADAPTER = 4
EXIT_IO = 5
EXIT_VERSION = 6
EXIT_OTHER = 1

ARTIFACTS = ("results.csv", "results.md", "report.md", "transcript.jsonl", "pipeline.spec")


def _exit_code_for(exc: Exception) -> int:
    if isinstance(exc, PhaseFailure):
        return EXIT_PHASE
    if isinstance(exc, AdapterError):
        return EXIT_ADAPTER
    if isinstance(exc, VersionError):
        return EXIT_VERSION
    if isinstance(exc, (OSError, ParseError, SchemaError)):
        return EXIT_IO
    return EXIT_OTHER


def _merged_option(flag_value, config: dict, key: str, default):
    """flags > config file > environment > default."""
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    env = os.environ.get(f"DRIFTAUDIT_{key.upper()}")
    if env is not None:
        return env
    return default


@click.group()
def main():
    """Audit image classifiers under simulated distribution shifts."""


@main.command("list")
@click.argument("what", type=click.Choice(["shifts", "metrics"]))
def cmd_list(what):
    """Print the shift or metric catalogue, one entry per line."""
    if what == "shifts":
        for kind in catalogue():
            if kind.parameterless:
                click.echo(f"{kind.name} - {kind.gloss}")
            else:
                click.echo(f"{kind.name}({kind.param_name}) - {kind.gloss} [{kind.domain}]")
    else:
        for name in ALL_METRICS:
            click.echo(name)


@main.command("audit")
@click.option("--model", default=None, help="toy:brightness, toy:color, http(s)://..., tcp://..., or *.onnx")
@click.option("--data", default=None, help="dataset manifest CSV")
@click.option("--backend", "backend_kind", default=None,
              type=click.Choice(["remote", "scripted", "rubric"]))
@click.option("--answers", default=None, help="canned answers file (key: value or JSON)")
@click.option("--sample-frac", default=None, type=float)
@click.option("--seed", default=None, type=int)
@click.option("--parallelism", default=None, type=int)
@click.option("--out", default=None, help="output directory")
@click.option("--endpoint", default=None, help="remote backend chat endpoint")
@click.option("--script", default=None, help="scripted backend replies (JSON list file)")
@click.option("--config", "config_path", default=None, help="JSON config file")
def cmd_audit(model, data, backend_kind, answers, sample_frac, seed, parallelism,
              out, endpoint, script, config_path):
    """Run a full audit and write the artifact set to the output directory."""
    config = {}
    if config_path:
        try:
            config = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            click.echo(f"error: cannot read config: {exc}", err=True)
            sys.exit(EXIT_IO)
    model = _merged_option(model, config, "model", None)
    data = _merged_option(data, config, "data", None)
    backend_kind = _merged_option(backend_kind, config, "backend", "rubric")
    answers = _merged_option(answers, config, "answers", None)
    sample_frac = float(_merged_option(sample_frac, config, "sample_frac", 0.1))
    seed = int(_merged_option(seed, config, "seed", 0))
    parallelism = int(_merged_option(parallelism, config, "parallelism", 1))
    out = _merged_option(out, config, "out", None)
    endpoint = _merged_option(endpoint, config, "endpoint", None)

    if not model or not data or not out:
        click.echo("error: --model, --data, and --out are required", err=True)
        sys.exit(EXIT_USAGE)

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    transcript = None
    results = None
    audit_config = {
        "model": model,
        "data": str(Path(data).resolve()),
        "backend": backend_kind,
        "sample_frac": sample_frac,
        "seed": seed,
        "parallelism": parallelism,
    }

    def flush_partial():
        if transcript is not None:
            save_transcript(out_dir / "transcript.jsonl", transcript, audit_config)
        if results is not None:
            write_results_csv(results, out_dir / "results.csv")
            (out_dir / "results.md").write_text(results_markdown(results) + "\n")

    try:
        script_replies = None
        if script:
            script_replies = json.loads(Path(script).read_text())
        backend = make_backend(backend_kind, endpoint=endpoint, script=script_replies)
        driver = CannedDriver(load_answers_file(answers)) if answers else InteractiveDriver()
        dataset = load_dataset(data)

        transcript = DebateTranscript(backend.identity)
        specs, fingerprint, transcript = run_metric_phase(backend, driver, transcript)
        plan, profile, transcript = run_shift_phase(backend, driver, fingerprint, transcript)

        adapter = make_adapter(model, dataset.task_kind, dataset.num_classes)
        audit_plan = AuditPlan(
            metric_specs=specs,
            shift_plan=plan,
            sample_frac=sample_frac,
            base_seed=seed,
            parallelism=parallelism,
        )
        results = run_audit(audit_plan, dataset, adapter)
        if results.baseline().error:
            raise AdapterError(f"baseline evaluation failed: {results.baseline().error}")
        failed_rows = [r.label for r in results.rows if r.error]
        if failed_rows:
            click.echo(f"warning: {len(failed_rows)} rows failed: {failed_rows}", err=True)

        draft, transcript = run_analysis_phase(backend, results, transcript)
        report = render_report(results, draft, transcript_ref="transcript.jsonl")
        for warning in report.warnings:
            click.echo(f"warning: {warning}", err=True)

        flush_partial()
        (out_dir / "report.md").write_text(report.to_markdown() + "\n")
        (out_dir / "pipeline.spec").write_text(
            serialize_pipeline(report.section3_mitigation_pipeline)
        )
        click.echo(f"audit complete: {out_dir}")
    except PhaseFailure as exc:
        if exc.transcript is not None:
            transcript = exc.transcript
        flush_partial()
        click.echo(f"phase failure: {exc}", err=True)
        sys.exit(EXIT_PHASE)
    except DriftAuditError as exc:
        flush_partial()
        click.echo(f"error: {exc}", err=True)
        sys.exit(_exit_code_for(exc))
    except OSError as exc:
        flush_partial()
        click.echo(f"io error: {exc}", err=True)
        sys.exit(EXIT_IO)


@main.command("replay")
@click.argument("transcript_path")
@click.option("--out", required=True, help="output directory for replayed artifacts")
@click.option("--diff", "diff_path", default=None,
              help="compare the replayed results.csv against this file")
def cmd_replay(transcript_path, out, diff_path):
    """Re-run an audit from its transcript with the scripted backend."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        recorded, config = load_transcript(transcript_path)
        backend = ScriptedBackend(recorded.backend_replies(), identity="replay")
        driver = ReplayDriver(recorded.user_answers())

        transcript = DebateTranscript(backend.identity)
        specs, fingerprint, transcript = run_metric_phase(backend, driver, transcript)
        plan, profile, transcript = run_shift_phase(backend, driver, fingerprint, transcript)

        dataset = load_dataset(config["data"])
        adapter = make_adapter(config["model"], dataset.task_kind, dataset.num_classes)
        audit_plan = AuditPlan(
            metric_specs=specs,
            shift_plan=plan,
            sample_frac=float(config.get("sample_frac", 0.1)),
            base_seed=int(config.get("seed", 0)),
            parallelism=int(config.get("parallelism", 1)),
        )
        results = run_audit(audit_plan, dataset, adapter)
        draft, transcript = run_analysis_phase(backend, results, transcript)
        report = render_report(results, draft, transcript_ref="transcript.jsonl")

        write_results_csv(results, out_dir / "results.csv")
        (out_dir / "results.md").write_text(results_markdown(results) + "\n")
        (out_dir / "report.md").write_text(report.to_markdown() + "\n")
        (out_dir / "pipeline.spec").write_text(
            serialize_pipeline(report.section3_mitigation_pipeline)
        )
        save_transcript(out_dir / "transcript.jsonl", transcript, config)
    except DriftAuditError as exc:
        click.echo(f"replay failed: {exc}", err=True)
        sys.exit(_exit_code_for(exc))
    except OSError as exc:
        click.echo(f"io error: {exc}", err=True)
        sys.exit(EXIT_IO)

    if diff_path:
        ours = hashlib.sha256((out_dir / "results.csv").read_bytes()).hexdigest()
        try:
            theirs = hashlib.sha256(Path(diff_path).read_bytes()).hexdigest()
        except OSError as exc:
            click.echo(f"io error: {exc}", err=True)
            sys.exit(EXIT_IO)
        if ours == theirs:
            click.echo("identical")
        else:
            click.echo("different")
            sys.exit(EXIT_VERSION)
    else:
        click.echo(f"replay complete: {out_dir}")


@main.command("serve")
@click.option("--serve-port", "--port", "port", default=8321, type=int)
@click.option("--host", default="127.0.0.1")
@click.option("--workdir", default=None, help="directory for per-session artifacts")
def cmd_serve(port, host, workdir):
    """Run the HTTP session service for the web console."""
    import uvicorn

    from .service import create_app

    app = create_app(workdir=workdir)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except SystemExit:
        raise
    except OSError as exc:
        click.echo(f"cannot bind {host}:{port}: {exc}", err=True)
        sys.exit(EXIT_IO)


if __name__ == "__main__":
    main()
