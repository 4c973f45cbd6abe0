"""Batch CLI over the same pipeline the service exposes.

Exit codes: 0 success, 1 validation problem (bad input, unknown ids),
2 I/O or backend failure. `--json` switches output to machine-readable
records.
"""

from __future__ import annotations

import json
import sys
from datetime import timedelta
from pathlib import Path

import click

from . import costs, fixtures
from .agreement import NoPairableValuesError, krippendorff_alpha
from .config import ServiceConfig, load_config
from .contributions import RewardConflictError, RewardNotFoundError
from .gateway import Gateway, RemoteBackend, StubBackend
from .ingest import IngestError, parse_export
from .labels import Task, UnknownLabelError
from .metrics import format_report
from .moderation import FlagConflictError, FlagNotFoundError, FlagValidationError
from .personas import composition_report
from .pipeline import (
    classify_store,
    evaluate_and_record,
    export_retraining,
    sentiment_series,
)
from .store import EventStore
from .types import WeightValidationError, parse_instant

EXIT_VALIDATION = 1
EXIT_IO = 2


class CliState:
    def __init__(self, config: ServiceConfig, as_json: bool):
        self.config = config
        self.as_json = as_json
        self._store: EventStore | None = None

    @property
    def store(self) -> EventStore:
        if self._store is None:
            self._store = EventStore(self.config.store_dir, config=self.config.community)
        return self._store

    def gateway(self, backend: str) -> Gateway:
        community = self.store.state.config
        if backend == "stub":
            return Gateway(
                StubBackend(),
                tokenizer=community.tokenizer,
                price_per_1k_tokens=community.price_per_1k_tokens,
            )
        if backend == "remote":
            if not self.config.remote_endpoint or not self.config.remote_model:
                raise click.ClickException("remote backend is not configured")
            return Gateway(
                RemoteBackend(self.config.remote_endpoint, self.config.remote_model),
                rate_limit=self.config.rate_limit,
                tokenizer=community.tokenizer,
                price_per_1k_tokens=community.price_per_1k_tokens,
            )
        raise _fail(f"unknown backend {backend!r}")

    def emit(self, record: dict, text: str | None = None) -> None:
        if self.as_json:
            click.echo(json.dumps(record, ensure_ascii=False))
        else:
            click.echo(text if text is not None else json.dumps(record, indent=2))


def _fail(message: str, code: int = EXIT_VALIDATION) -> SystemExit:
    click.echo(f"error: {message}", err=True)
    return SystemExit(code)


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Config file (JSON); defaults to $HYPERMOD_CONFIG.",
)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def main(ctx: click.Context, config_path: Path | None, as_json: bool) -> None:
    """Community moderation and culture analytics pipeline."""
    try:
        config = load_config(config_path)
    except (OSError, ValueError) as exc:
        raise _fail(f"cannot load config: {exc}", EXIT_IO)
    ctx.obj = CliState(config, as_json)


@main.command()
@click.argument("export_file", type=click.Path(exists=True, path_type=Path))
@click.pass_obj
def ingest(state: CliState, export_file: Path) -> None:
    """Parse a chat export into the store."""
    try:
        report = parse_export(export_file, state.store)
    except IngestError as exc:
        raise _fail(str(exc))
    except OSError as exc:
        raise _fail(str(exc), EXIT_IO)
    state.emit(
        report.to_record(),
        f"retained {report.retained} of {report.total_read} "
        f"(empty {report.empty_dropped}, bot {report.bot_dropped}, "
        f"dup {report.duplicates_dropped}); "
        f"{report.channels} channels, {report.active_users} users",
    )


@main.command()
@click.option("--task", required=True, type=click.Choice([t.value for t in Task]))
@click.option("--backend", default="stub", type=click.Choice(["stub", "remote"]))
@click.option("--parallelism", default=None, type=int)
@click.pass_obj
def classify(state: CliState, task: str, backend: str, parallelism: int | None) -> None:
    """Classify every stored message for one task."""
    gateway = state.gateway(backend)
    run = classify_store(
        state.store, gateway, Task(task), parallelism=parallelism or state.config.parallelism
    )
    state.emit(
        run.to_record(),
        f"{run.message_count} messages: {run.backend_calls} backend calls, "
        f"{run.cache_hits} cache hits, ~{run.token_usage} tokens "
        f"(est. {run.estimated_cost:.4f})",
    )


@main.command()
@click.pass_obj
def personas(state: CliState) -> None:
    """Community composition report."""
    s = state.store.state
    report = composition_report(s.profiles, s.intent_label_counts)
    state.emit(
        report.to_record(),
        f"{report.active_users} active users: "
        f"{report.n_crypto} crypto ({report.pct_crypto}%), "
        f"{report.n_fan} fan ({report.pct_fan}%), "
        f"{report.n_casual} casual ({report.pct_casual}%)",
    )


@main.group()
def flags() -> None:
    """Moderation flag queue."""


@flags.command("list")
@click.option("--state", "flag_state", default="pending")
@click.option("--limit", default=20, type=int)
@click.pass_obj
def flags_list(state: CliState, flag_state: str, limit: int) -> None:
    store_state = state.store.state
    rows = []
    for fid in store_state.flag_order:
        flag = store_state.flags[fid]
        if flag_state != "all" and flag.state != flag_state:
            continue
        rows.append(flag.to_record())
        if len(rows) >= limit:
            break
    state.emit({"items": rows}, "\n".join(
        f"{r['flag_id']}  {r['predicted_label']:<12} {r['state']}" for r in rows
    ) or "no flags")


@flags.command("decide")
@click.argument("flag_id")
@click.option("--verdict", required=True, type=click.Choice(["upheld", "overturned"]))
@click.option("--moderator", "moderator_id", required=True)
@click.option("--note", default=None)
@click.option("--label", default=None, help="Gold label for needs_label flags.")
@click.pass_obj
def flags_decide(
    state: CliState, flag_id: str, verdict: str, moderator_id: str, note: str | None, label: str | None
) -> None:
    try:
        flag, example = state.store.decide_flag(
            flag_id, verdict=verdict, moderator_id=moderator_id, note=note, label=label
        )
    except FlagNotFoundError:
        raise _fail(f"not_found: no such flag {flag_id}")
    except FlagConflictError as exc:
        raise _fail(f"conflict: {exc}")
    except (FlagValidationError, UnknownLabelError) as exc:
        raise _fail(str(exc))
    record = flag.to_record()
    record["curation_example_id"] = example.example_id
    state.emit(record, f"{flag.flag_id} -> {flag.state}; curation example {example.example_id}")


@main.group()
def rewards() -> None:
    """Reward recommendation queue."""


@rewards.command("list")
@click.option("--state", "reward_state", default="pending")
@click.pass_obj
def rewards_list(state: CliState, reward_state: str) -> None:
    store_state = state.store.state
    rows = [
        store_state.rewards[rid].to_record()
        for rid in store_state.reward_order
        if reward_state == "all" or store_state.rewards[rid].state == reward_state
    ]
    state.emit({"items": rows}, "\n".join(
        f"{r['reward_id']}  {r['author_id']}  m={r['multiple']}  {r['state']}" for r in rows
    ) or "no reward recommendations")


@rewards.command("decide")
@click.argument("reward_id")
@click.option("--verdict", required=True, type=click.Choice(["approved", "rejected"]))
@click.option("--moderator", "moderator_id", required=True)
@click.pass_obj
def rewards_decide(state: CliState, reward_id: str, verdict: str, moderator_id: str) -> None:
    try:
        reward = state.store.decide_reward(reward_id, verdict=verdict, moderator_id=moderator_id)
    except RewardNotFoundError:
        raise _fail(f"not_found: no such reward {reward_id}")
    except RewardConflictError as exc:
        raise _fail(f"conflict: {exc}")
    state.emit(reward.to_record(), f"{reward.reward_id} -> {reward.state}")


@main.command()
@click.option("--limit", default=20, type=int)
@click.pass_obj
def leaderboard(state: CliState, limit: int) -> None:
    """Contribution score ranking with persona flags."""
    from .pipeline import leaderboard as board

    rows = board(state.store, limit=limit)
    state.emit({"items": rows}, "\n".join(
        f"{r['author_id']:<12} {r['score']:>8.1f}  hwm {r['high_water_mark']}  "
        f"{','.join(r['personas']) or '-'}"
        for r in rows
    ) or "no contributions yet")


@main.command()
@click.option("--window", default="daily", type=click.Choice(["daily", "hourly"]))
@click.option("--channel", default=None)
@click.pass_obj
def sentiment(state: CliState, window: str, channel: str | None) -> None:
    """Sentiment pulse series."""
    span = timedelta(days=1) if window == "daily" else timedelta(hours=1)
    buckets = sentiment_series(state.store, span, channel=channel)
    state.emit(
        {"items": [b.to_record() for b in buckets]},
        "\n".join(
            f"{b.window_start.date()}  {b.channel_id:<10} "
            f"+{b.n_positive} ={b.n_neutral} -{b.n_negative}  mean {b.mean_score:+.3f}"
            for b in buckets
        )
        or "no sentiment data",
    )


@main.command()
@click.option("--task", required=True, type=click.Choice([t.value for t in Task]))
@click.option("--test", "test_path", type=click.Path(exists=True, path_type=Path), default=None)
@click.pass_obj
def evaluate(state: CliState, task: str, test_path: Path | None) -> None:
    """Score the stub backend on a labeled test split."""
    try:
        record = evaluate_and_record(state.store, state.gateway("stub"), Task(task), test_path)
    except (ValueError, UnknownLabelError) as exc:
        raise _fail(str(exc))
    if state.as_json:
        state.emit(record)
    else:
        from .metrics import ClassMetrics, EvaluationReport  # local import for reformat

        per_class = tuple(
            ClassMetrics(
                label=row["label"],
                precision=row["precision"],
                recall=row["recall"],
                f1=row["f1"],
                support=row["support"],
            )
            for row in record["per_class"]
        )
        report = EvaluationReport(
            task=Task(task),
            per_class=per_class,
            accuracy=record["accuracy"],
            macro_precision=record["macro"][0],
            macro_recall=record["macro"][1],
            macro_f1=record["macro"][2],
            weighted_precision=record["weighted"][0],
            weighted_recall=record["weighted"][1],
            weighted_f1=record["weighted"][2],
            n=record["n"],
        )
        click.echo(format_report(report))


@main.command()
@click.argument("grid_file", type=click.Path(exists=True, path_type=Path))
@click.pass_obj
def agreement(state: CliState, grid_file: Path) -> None:
    """Krippendorff alpha over a units-by-annotators grid file (JSON)."""
    try:
        grid = json.loads(grid_file.read_text(encoding="utf-8"))
        if isinstance(grid, dict):
            grid = grid["units"]
        report = krippendorff_alpha(grid)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise _fail(f"cannot read grid: {exc}", EXIT_IO)
    except NoPairableValuesError as exc:
        raise _fail(str(exc))
    state.emit(
        report.to_record(),
        f"alpha = {report.alpha:.4f} over {report.n} pairable values "
        f"(Do {report.observed_disagreement:.4f}, De {report.expected_disagreement:.4f})",
    )


@main.command()
@click.option("--preset", "preset_name", default=None)
@click.option("--scenario", "scenario_file", type=click.Path(exists=True, path_type=Path), default=None)
@click.pass_obj
def cost(state: CliState, preset_name: str | None, scenario_file: Path | None) -> None:
    """Agency-cost report from a preset or a scenario file."""
    if (preset_name is None) == (scenario_file is None):
        raise _fail("provide exactly one of --preset or --scenario")
    try:
        if preset_name is not None:
            scenario = costs.preset(preset_name)
        else:
            scenario = costs.CostScenario.from_record(
                json.loads(scenario_file.read_text(encoding="utf-8"))
            )
    except costs.UnknownPresetError:
        raise _fail(f"not_found: no such preset {preset_name!r}")
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise _fail(f"bad scenario: {exc}")
    report = costs.compute(scenario)
    state.emit(report.to_record(), report.format())


@main.command("export-retraining")
@click.option("--task", required=True, type=click.Choice([t.value for t in Task]))
@click.option("--source", default="curation")
@click.option("--from", "since", default=None, help="ISO-8601 lower bound on decision time.")
@click.pass_obj
def export_retraining_cmd(state: CliState, task: str, source: str, since: str | None) -> None:
    """Write curated examples as a retraining split."""
    since_dt = None
    if since:
        try:
            since_dt = parse_instant(since)
        except ValueError as exc:
            raise _fail(f"bad timestamp: {exc}")
    path, count = export_retraining(state.store, Task(task), source=source, since=since_dt)
    state.emit({"path": str(path), "count": count}, f"wrote {count} examples to {path}")


@main.command()
@click.option("--port", default=8800, type=int)
@click.option("--host", default="127.0.0.1")
@click.pass_obj
def serve(state: CliState, port: int, host: str) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import AppContext, create_app

    app = create_app(AppContext(state.store, state.config))
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command("make-fixtures")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.pass_obj
def make_fixtures(state: CliState, out_dir: Path) -> None:
    """Generate the synthetic chat export and labeled evaluation splits."""
    out_dir.mkdir(parents=True, exist_ok=True)
    plan = fixtures.write_export(out_dir / "export.jsonl")
    written = {"export": str(plan.path)}
    for task, builder in fixtures.EVAL_SETS.items():
        path = fixtures.write_eval_set(out_dir / f"eval-{task.value}.jsonl", task, builder())
        written[task.value] = str(path)
    state.emit(written, "\n".join(f"{k}: {v}" for k, v in written.items()))


def run() -> None:
    try:
        main(standalone_mode=True)
    except SystemExit:
        raise
    except OSError as exc:  # I/O trouble outside a handler
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)


if __name__ == "__main__":
    run()
