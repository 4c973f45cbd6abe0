"""High-level operations shared by the HTTP service and the CLI."""

from __future__ import annotations

import json
from datetime import datetime
from pathlib import Path

from .gateway import BatchItem, BatchRun, Gateway
from .labels import Task
from .metrics import EvaluationReport, confusion, evaluate
from .sentiment import SentimentBucket, bucketize
from .store import EventStore, example_from_record, example_to_record
from .types import Abstain, AnnotatedExample, Classification, format_instant


def classify_store(
    store: EventStore, gateway: Gateway, task: Task, parallelism: int = 1
) -> BatchRun:
    """Classify every stored message for a task and record the outcomes.

    Messages already classified under this (task, model_version) are skipped
    up front, so an interrupted batch resumes from its last committed outcome.
    """
    task = Task(task)
    state = store.state
    version = gateway.backend.model_version
    items = []
    for channel in sorted(state.channel_order):
        for _, message_id in state.channel_order[channel]:
            if (message_id, task.value, version) in state.classifications:
                continue
            msg = state.messages[message_id]
            context = tuple(m.content for m in state.context_window(message_id))
            items.append(
                BatchItem(
                    message_id=message_id,
                    text=msg.content,
                    context=context if task is Task.CONTRIBUTION else (),
                    author_id=msg.author_id,
                )
            )
    run = gateway.run_batch(task, items, parallelism=parallelism)
    by_id = {item.message_id: item for item in items}
    for outcome in run.outcomes:
        if isinstance(outcome, Classification):
            store.record_classification(
                outcome,
                author_id=by_id[outcome.message_id].author_id,
                context_size=len(by_id[outcome.message_id].context),
            )
        else:
            store.record_abstain(outcome)
    store.record_batch(run.to_record())
    return run


def load_examples(path: str | Path, task: Task | None = None) -> list[AnnotatedExample]:
    """Read line-delimited example records, optionally filtered by task."""
    examples = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            example = example_from_record(json.loads(line))
            if task is None or example.task is Task(task):
                examples.append(example)
    return examples


def evaluate_examples(
    gateway: Gateway, task: Task, examples: list[AnnotatedExample]
) -> tuple[EvaluationReport, int]:
    """Stub- or remote-classify a labeled test split and score it.

    Returns the report plus the number of abstained examples (excluded from
    the matrix; the stub never abstains).
    """
    task = Task(task)
    pairs = []
    abstained = 0
    for ex in examples:
        outcome = gateway.classify(task, ex.text, ex.context, message_id=ex.example_id)
        if isinstance(outcome, Abstain):
            abstained += 1
            continue
        pairs.append((ex.gold_label, outcome.label))
    report = evaluate(confusion(pairs, task))
    return report, abstained


def evaluate_and_record(
    store: EventStore, gateway: Gateway, task: Task, test_split_path: str | Path | None
) -> dict:
    """Evaluate from a split file (or the store's held-out test examples) and
    persist the report for GET /api/metrics/{task}."""
    task = Task(task)
    if test_split_path is not None:
        examples = load_examples(test_split_path, task)
    else:
        examples = [
            store.state.examples[eid]
            for eid in store.state.example_order
            if store.state.examples[eid].task is task
            and store.state.examples[eid].split == "test"
        ]
    if not examples:
        raise ValueError(f"no test examples available for task {task.value}")
    report, abstained = evaluate_examples(gateway, task, examples)
    record = report.to_record()
    record["abstained"] = abstained
    store.record_evaluation(task, record)
    return record


def sentiment_series(
    store: EventStore,
    window,
    channel: str | None = None,
    since: datetime | None = None,
    until: datetime | None = None,
) -> list[SentimentBucket]:
    """Bucketed sentiment over stored classifications, on the message timeline."""
    observations = []
    for clf in store.state.classifications.values():
        if clf.task is not Task.SENTIMENT:
            continue
        msg = store.state.messages.get(clf.message_id)
        if msg is None:
            continue
        observations.append((msg.channel_id, msg.timestamp, clf.label))
    buckets = bucketize(observations, window=window, channel=channel)
    if since is not None:
        buckets = [b for b in buckets if b.window_end > since]
    if until is not None:
        buckets = [b for b in buckets if b.window_start < until]
    return buckets


def leaderboard(store: EventStore, limit: int = 20) -> list[dict]:
    """Contribution ledger ordered by score, with persona flags attached."""
    entries = []
    for ledger in store.state.ledgers.values():
        profile = store.state.profiles.get(ledger.author_id)
        personas = []
        if profile is not None:
            if profile.is_crypto_enthusiast:
                personas.append("crypto")
            if profile.is_fan:
                personas.append("fan")
            if profile.is_casual:
                personas.append("casual")
        entries.append(
            {
                "author_id": ledger.author_id,
                "score": ledger.score,
                "high_water_mark": ledger.high_water_mark,
                "event_count": ledger.event_count,
                "personas": personas,
            }
        )
    entries.sort(key=lambda e: (-e["score"], e["author_id"]))
    return entries[:limit]


def export_retraining(
    store: EventStore,
    task: Task,
    source: str = "curation",
    since: datetime | None = None,
    out_dir: str | Path | None = None,
) -> tuple[Path, int]:
    """Write curation (or other-source) examples as a retraining split."""
    task = Task(task)
    out_dir = Path(out_dir) if out_dir is not None else store.root / "exports"
    out_dir.mkdir(parents=True, exist_ok=True)
    stamp = format_instant(datetime.now().astimezone()).replace(":", "-")
    out_path = out_dir / f"retraining-{task.value}-{stamp}.jsonl"
    count = 0
    with out_path.open("w", encoding="utf-8") as fh:
        for eid in store.state.example_order:
            example = store.state.examples[eid]
            if example.task is not task or example.source != source:
                continue
            if since is not None and (example.created_at is None or example.created_at < since):
                continue
            fh.write(json.dumps(example_to_record(example), ensure_ascii=False) + "\n")
            count += 1
    return out_path, count
