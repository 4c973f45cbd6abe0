"""Append-only event log with snapshots; the single source of truth per community.

All mutations go through one writer: a command method validates, appends one
line to the log, then folds the event into in-memory state. Replaying the log
(or a snapshot plus the tail) reconstructs identical state, which is what the
curation-feeds-retraining audit trail depends on.

Flags and reward recommendations are *derived* inside the fold with ids taken
from the causing event's sequence number, so they come back identical on
replay and a contribution event and the recommendations it triggers can never
be separated by a crash.
"""

from __future__ import annotations

import bisect
import json
import logging
import threading
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Iterator

from . import contributions as contrib
from . import moderation as modq
from . import personas
from .labels import Task
from .types import (
    Abstain,
    AnnotatedExample,
    ChatMessage,
    Classification,
    CommunityConfig,
    format_instant,
    parse_instant,
    utcnow,
)

logger = logging.getLogger(__name__)

SNAPSHOT_SCHEMA = "hypermod-snapshot-1"


class StoreCorruptError(RuntimeError):
    pass


class DuplicateExampleError(ValueError):
    pass


class MessageNotFoundError(KeyError):
    pass


@dataclass
class State:
    """Materialized view of the event log."""

    config: CommunityConfig = field(default_factory=CommunityConfig)
    messages: dict[str, ChatMessage] = field(default_factory=dict)
    channel_order: dict[str, list[tuple[datetime, str]]] = field(default_factory=dict)
    classifications: dict[tuple[str, str, str], Classification] = field(default_factory=dict)
    abstains: list[Abstain] = field(default_factory=list)
    examples: dict[str, AnnotatedExample] = field(default_factory=dict)
    example_order: list[str] = field(default_factory=list)
    flags: dict[str, modq.Flag] = field(default_factory=dict)
    flag_order: list[str] = field(default_factory=list)
    open_flag_by_message: dict[str, str] = field(default_factory=dict)
    flagged_messages: set[str] = field(default_factory=set)
    profiles: dict[str, personas.PersonaProfile] = field(default_factory=dict)
    intent_label_counts: dict[str, int] = field(default_factory=dict)
    contribution_events: list[contrib.ContributionEvent] = field(default_factory=list)
    ledgers: dict[str, contrib.ScoreLedger] = field(default_factory=dict)
    rewards: dict[str, contrib.RewardRecommendation] = field(default_factory=dict)
    reward_order: list[str] = field(default_factory=list)
    last_reports: dict[str, dict] = field(default_factory=dict)
    batches: list[dict] = field(default_factory=list)
    idempotency: dict[str, dict] = field(default_factory=dict)
    last_seq: int = 0

    # -- fold -------------------------------------------------------------

    def apply(self, seq: int, kind: str, data: dict[str, Any]) -> None:
        handler = getattr(self, f"_apply_{kind}", None)
        if handler is None:
            raise StoreCorruptError(f"unknown event kind {kind!r} at seq {seq}")
        handler(seq, data)
        self.last_seq = seq

    def _apply_config_set(self, seq: int, data: dict) -> None:
        self.config = CommunityConfig.from_record(data["config"])

    def _apply_weights_set(self, seq: int, data: dict) -> None:
        self.config = self.config.with_weights(data["weights"])

    def _apply_message_ingested(self, seq: int, data: dict) -> None:
        msg = ChatMessage.from_record(data["message"])
        if msg.message_id in self.messages:
            return
        self.messages[msg.message_id] = msg
        order = self.channel_order.setdefault(msg.channel_id, [])
        bisect.insort(order, (msg.timestamp, msg.message_id))

    def _apply_classification_recorded(self, seq: int, data: dict) -> None:
        clf = Classification(
            message_id=data["message_id"],
            task=Task(data["task"]),
            label=data["label"],
            scores=data.get("scores"),
            backend_id=data["backend_id"],
            model_version=data["model_version"],
            created_at=parse_instant(data["created_at"]),
        )
        if clf.key in self.classifications:
            return  # (message_id, task, model_version) is unique; replays stay idempotent
        self.classifications[clf.key] = clf
        msg = self.messages.get(clf.message_id)
        if clf.task is Task.INTENT:
            author = data.get("author_id") or (msg.author_id if msg else None)
            if author is not None:
                profile = self.profiles.setdefault(author, personas.PersonaProfile(author))
                personas.update_profile(
                    profile, clf.label, clf.created_at, self.config.persona_threshold
                )
            self.intent_label_counts[clf.label] = self.intent_label_counts.get(clf.label, 0) + 1
        elif clf.task is Task.MODERATION:
            self._maybe_flag(seq, clf)
        elif clf.task is Task.CONTRIBUTION:
            self._score_contribution(seq, clf, data)

    def _maybe_flag(self, seq: int, outcome: Classification | Abstain) -> None:
        if outcome.message_id in self.open_flag_by_message:
            return  # one open flag per message at a time
        flag = modq.policy_flag(outcome, self.config, flag_id=f"flag-{seq}", created_seq=seq)
        if flag is None:
            return
        self._add_flag(flag)

    def _add_flag(self, flag: modq.Flag) -> None:
        self.flags[flag.flag_id] = flag
        self.flag_order.append(flag.flag_id)
        self.open_flag_by_message[flag.message_id] = flag.flag_id
        self.flagged_messages.add(flag.message_id)

    def _score_contribution(self, seq: int, clf: Classification, data: dict) -> None:
        if clf.label == "na":
            return
        msg = self.messages.get(clf.message_id)
        author = data.get("author_id") or (msg.author_id if msg else None)
        if author is None:
            return
        event = contrib.ContributionEvent(
            message_id=clf.message_id,
            author_id=author,
            label=clf.label,
            weight=self.config.contribution_weights[clf.label],
            occurred_at=clf.created_at,
        )
        self.contribution_events.append(event)
        ledger = self.ledgers.setdefault(author, contrib.ScoreLedger(author))
        contrib.accumulate(ledger, event, self.config.decay_half_life)
        blocked = {
            r.multiple
            for r in self.rewards.values()
            if r.author_id == author and r.state in ("pending", "approved")
        }
        for m in contrib.due_multiples(
            ledger.score, self.config.reward_threshold, ledger.high_water_mark, blocked
        ):
            rec = contrib.RewardRecommendation(
                reward_id=f"reward-{seq}-m{m}",
                author_id=author,
                trigger_score=ledger.score,
                multiple=m,
                created_seq=seq,
            )
            self.rewards[rec.reward_id] = rec
            self.reward_order.append(rec.reward_id)

    def _apply_abstain_recorded(self, seq: int, data: dict) -> None:
        outcome = Abstain(
            message_id=data["message_id"],
            task=Task(data["task"]),
            reason=data["reason"],
            raw=data["raw"],
            backend_id=data["backend_id"],
            model_version=data["model_version"],
            created_at=parse_instant(data["created_at"]),
        )
        self.abstains.append(outcome)
        if outcome.task is Task.MODERATION:
            self._maybe_flag(seq, outcome)

    def _apply_example_added(self, seq: int, data: dict) -> None:
        example = example_from_record(data["example"])
        if example.example_id in self.examples:
            return
        self.examples[example.example_id] = example
        self.example_order.append(example.example_id)

    def _apply_flag_decided(self, seq: int, data: dict) -> None:
        flag = self.flags[data["flag_id"]]
        message = self.messages.get(flag.message_id)
        text = message.content if message else ""
        context = tuple(data.get("context_texts", ()))
        example = modq.apply_decision(
            flag,
            verdict=data["verdict"],
            moderator_id=data["moderator_id"],
            decided_at=parse_instant(data["decided_at"]),
            note=data.get("note"),
            label=data.get("label"),
            message_text=text,
            message_context=context,
            example_id=f"example-{seq}",
        )
        self.examples[example.example_id] = example
        self.example_order.append(example.example_id)
        self.open_flag_by_message.pop(flag.message_id, None)
        key = data.get("idempotency_key")
        if key:
            self.idempotency[key] = {"kind": "flag", "id": flag.flag_id}

    def _apply_reward_decided(self, seq: int, data: dict) -> None:
        reward = self.rewards[data["reward_id"]]
        if reward.state != "pending":
            raise contrib.RewardConflictError(f"reward {reward.reward_id} already {reward.state}")
        reward.state = data["verdict"]
        reward.decided_by = data["moderator_id"]
        reward.decided_at = parse_instant(data["decided_at"])
        if reward.state == "approved":
            ledger = self.ledgers[reward.author_id]
            ledger.high_water_mark = max(ledger.high_water_mark, reward.multiple)
        key = data.get("idempotency_key")
        if key:
            self.idempotency[key] = {"kind": "reward", "id": reward.reward_id}

    def _apply_audit_sampled(self, seq: int, data: dict) -> None:
        for i, message_id in enumerate(data["message_ids"]):
            if message_id in self.open_flag_by_message:
                continue
            self._add_flag(
                modq.Flag(
                    flag_id=f"flag-{seq}-{i}",
                    message_id=message_id,
                    predicted_label=modq.NEEDS_LABEL,
                    created_seq=seq,
                )
            )

    def _apply_evaluation_recorded(self, seq: int, data: dict) -> None:
        self.last_reports[data["task"]] = data["report"]

    def _apply_batch_recorded(self, seq: int, data: dict) -> None:
        self.batches.append(data["run"])

    # -- reads used across modules -----------------------------------------

    def context_window(self, message_id: str, width: int = 2) -> list[ChatMessage]:
        """Up to `width` messages immediately preceding, same channel, oldest first."""
        msg = self.messages.get(message_id)
        if msg is None:
            raise MessageNotFoundError(message_id)
        order = self.channel_order[msg.channel_id]
        idx = bisect.bisect_left(order, (msg.timestamp, msg.message_id))
        lo = max(0, idx - width)
        return [self.messages[mid] for _, mid in order[lo:idx]]

    def classification_for(self, message_id: str, task: Task) -> Classification | None:
        hits = [
            c
            for (mid, t, _), c in self.classifications.items()
            if mid == message_id and t == task.value
        ]
        return max(hits, key=lambda c: c.created_at) if hits else None

    # -- serialization -------------------------------------------------------

    def to_record(self) -> dict[str, Any]:
        return {
            "config": self.config.to_record(),
            "messages": [m.to_record() for m in self.messages.values()],
            "classifications": [
                {
                    "message_id": c.message_id,
                    "task": c.task.value,
                    "label": c.label,
                    "scores": c.scores,
                    "backend_id": c.backend_id,
                    "model_version": c.model_version,
                    "created_at": format_instant(c.created_at),
                }
                for c in self.classifications.values()
            ],
            "abstains": [
                {
                    "message_id": a.message_id,
                    "task": a.task.value,
                    "reason": a.reason,
                    "raw": a.raw,
                    "backend_id": a.backend_id,
                    "model_version": a.model_version,
                    "created_at": format_instant(a.created_at),
                }
                for a in self.abstains
            ],
            "examples": [example_to_record(self.examples[eid]) for eid in self.example_order],
            "flags": [self.flags[fid].to_record() for fid in self.flag_order],
            "open_flag_by_message": dict(self.open_flag_by_message),
            "flagged_messages": sorted(self.flagged_messages),
            "profiles": [p.to_record() for p in self.profiles.values()],
            "intent_label_counts": dict(self.intent_label_counts),
            "contribution_events": [e.to_record() for e in self.contribution_events],
            "ledgers": [l.to_record() for l in self.ledgers.values()],
            "rewards": [self.rewards[rid].to_record() for rid in self.reward_order],
            "last_reports": dict(self.last_reports),
            "batches": list(self.batches),
            "idempotency": dict(self.idempotency),
            "last_seq": self.last_seq,
        }

    @classmethod
    def from_record(cls, rec: dict[str, Any]) -> "State":
        state = cls(config=CommunityConfig.from_record(rec["config"]))
        for mrec in rec["messages"]:
            msg = ChatMessage.from_record(mrec)
            state.messages[msg.message_id] = msg
            order = state.channel_order.setdefault(msg.channel_id, [])
            bisect.insort(order, (msg.timestamp, msg.message_id))
        for crec in rec["classifications"]:
            clf = Classification(
                message_id=crec["message_id"],
                task=Task(crec["task"]),
                label=crec["label"],
                scores=crec.get("scores"),
                backend_id=crec["backend_id"],
                model_version=crec["model_version"],
                created_at=parse_instant(crec["created_at"]),
            )
            state.classifications[clf.key] = clf
        for arec in rec["abstains"]:
            state.abstains.append(
                Abstain(
                    message_id=arec["message_id"],
                    task=Task(arec["task"]),
                    reason=arec["reason"],
                    raw=arec["raw"],
                    backend_id=arec["backend_id"],
                    model_version=arec["model_version"],
                    created_at=parse_instant(arec["created_at"]),
                )
            )
        for erec in rec["examples"]:
            example = example_from_record(erec)
            state.examples[example.example_id] = example
            state.example_order.append(example.example_id)
        for frec in rec["flags"]:
            flag = modq.Flag(
                flag_id=frec["flag_id"],
                message_id=frec["message_id"],
                predicted_label=frec["predicted_label"],
                scores=frec.get("scores"),
                state=frec["state"],
                decided_by=frec.get("decided_by"),
                decided_at=(
                    None if frec.get("decided_at") is None else parse_instant(frec["decided_at"])
                ),
                note=frec.get("note"),
                created_seq=frec.get("created_seq", 0),
            )
            state.flags[flag.flag_id] = flag
            state.flag_order.append(flag.flag_id)
        state.open_flag_by_message = dict(rec["open_flag_by_message"])
        state.flagged_messages = set(rec["flagged_messages"])
        for prec in rec["profiles"]:
            profile = personas.PersonaProfile(
                author_id=prec["author_id"],
                counts=dict(prec["counts"]),
                is_crypto_enthusiast=prec["is_crypto_enthusiast"],
                is_fan=prec["is_fan"],
                is_casual=prec["is_casual"],
                last_updated=(
                    None
                    if prec.get("last_updated") is None
                    else parse_instant(prec["last_updated"])
                ),
            )
            state.profiles[profile.author_id] = profile
        state.intent_label_counts = dict(rec["intent_label_counts"])
        for evrec in rec["contribution_events"]:
            state.contribution_events.append(
                contrib.ContributionEvent(
                    message_id=evrec["message_id"],
                    author_id=evrec["author_id"],
                    label=evrec["label"],
                    weight=float(evrec["weight"]),
                    occurred_at=parse_instant(evrec["occurred_at"]),
                )
            )
        for lrec in rec["ledgers"]:
            state.ledgers[lrec["author_id"]] = contrib.ScoreLedger(
                author_id=lrec["author_id"],
                score=float(lrec["score"]),
                high_water_mark=int(lrec["high_water_mark"]),
                last_event_at=(
                    None
                    if lrec.get("last_event_at") is None
                    else parse_instant(lrec["last_event_at"])
                ),
                event_count=int(lrec.get("event_count", 0)),
            )
        for rrec in rec["rewards"]:
            reward = contrib.RewardRecommendation(
                reward_id=rrec["reward_id"],
                author_id=rrec["author_id"],
                trigger_score=float(rrec["trigger_score"]),
                multiple=int(rrec["multiple"]),
                state=rrec["state"],
                decided_by=rrec.get("decided_by"),
                decided_at=(
                    None if rrec.get("decided_at") is None else parse_instant(rrec["decided_at"])
                ),
                created_seq=rrec.get("created_seq", 0),
            )
            state.rewards[reward.reward_id] = reward
            state.reward_order.append(reward.reward_id)
        state.last_reports = dict(rec["last_reports"])
        state.batches = list(rec["batches"])
        state.idempotency = dict(rec["idempotency"])
        state.last_seq = int(rec["last_seq"])
        return state

    def fingerprint(self) -> str:
        """Digest of the full serialized state, for field-for-field comparisons.

        Record ordering is deterministic (event order drives every dict's
        insertion order, replay included), so no key sorting is needed.
        """
        import hashlib

        digest = hashlib.sha256()
        for chunk in json.JSONEncoder(ensure_ascii=False, separators=(",", ":")).iterencode(
            self.to_record()
        ):
            digest.update(chunk.encode("utf-8"))
        return digest.hexdigest()


def example_to_record(example: AnnotatedExample) -> dict[str, Any]:
    return {
        "example_id": example.example_id,
        "text": example.text,
        "context": list(example.context),
        "task": example.task.value,
        "gold_label": example.gold_label,
        "annotator_ids": list(example.annotator_ids),
        "split": example.split,
        "source": example.source,
        "created_at": None if example.created_at is None else format_instant(example.created_at),
    }


def example_from_record(rec: dict[str, Any]) -> AnnotatedExample:
    return AnnotatedExample(
        example_id=rec["example_id"],
        text=rec["text"],
        context=tuple(rec.get("context", ())),
        task=Task(rec["task"]),
        gold_label=rec["gold_label"],
        annotator_ids=tuple(rec["annotator_ids"]),
        split=rec.get("split", "train"),
        source=rec.get("source", "human"),
        created_at=(
            None if rec.get("created_at") is None else parse_instant(rec["created_at"])
        ),
    )


class EventStore:
    """Single-writer durable store for one community."""

    def __init__(
        self, root: str | Path, config: CommunityConfig | None = None, fsync: bool = False
    ):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.log_path = self.root / "events.log"
        self.snapshot_dir = self.root / "snapshots"
        self.snapshot_dir.mkdir(exist_ok=True)
        self._fsync = fsync
        self._lock = threading.RLock()
        self.state = self._recover()
        self._log_file = self.log_path.open("a", encoding="utf-8")
        if self.state.last_seq == 0 and config is not None:
            self.append("config_set", {"config": config.to_record()})

    # -- recovery ---------------------------------------------------------

    def _recover(self) -> State:
        state = State()
        start_seq = 0
        snapshot = self._latest_snapshot()
        if snapshot is not None:
            try:
                state, start_seq = self._load_snapshot(snapshot)
            except Exception:
                logger.warning("snapshot %s unreadable; replaying full log", snapshot.name)
                state, start_seq = State(), 0
        for seq, kind, _at, data in self._read_log(after_seq=start_seq):
            state.apply(seq, kind, data)
        return state

    def _latest_snapshot(self) -> Path | None:
        candidates = sorted(self.snapshot_dir.glob("snapshot-*.json"))
        return candidates[-1] if candidates else None

    def _load_snapshot(self, path: Path) -> tuple[State, int]:
        payload = json.loads(path.read_text(encoding="utf-8"))
        if payload.get("schema") != SNAPSHOT_SCHEMA:
            raise StoreCorruptError(f"unknown snapshot schema in {path.name}")
        return State.from_record(payload["state"]), int(payload["seq"])

    def _read_log(self, after_seq: int = 0) -> Iterator[tuple[int, str, str, dict]]:
        if not self.log_path.exists():
            return
        with self.log_path.open("r", encoding="utf-8") as fh:
            lines = fh.readlines()
        for i, line in enumerate(lines):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                seq, kind, at, data = rec["seq"], rec["kind"], rec["at"], rec["data"]
            except (json.JSONDecodeError, KeyError) as exc:
                if i == len(lines) - 1:
                    # torn final write: the append never completed, drop it
                    logger.warning("dropping torn final log line")
                    return
                raise StoreCorruptError(f"corrupt log line {i + 1}: {exc}") from exc
            if seq <= after_seq:
                continue
            yield seq, kind, at, data

    # -- writer -------------------------------------------------------------

    def append(self, kind: str, data: dict[str, Any], at: datetime | None = None) -> int:
        """Durably append one event and fold it into state. Returns its sequence number."""
        with self._lock:
            seq = self.state.last_seq + 1
            at_s = format_instant(at or utcnow())
            line = json.dumps(
                {"seq": seq, "kind": kind, "at": at_s, "data": data},
                ensure_ascii=False,
                separators=(",", ":"),
            )
            self._log_file.write(line + "\n")
            self._log_file.flush()
            if self._fsync:
                import os

                os.fsync(self._log_file.fileno())
            self.state.apply(seq, kind, data)
            return seq

    def close(self) -> None:
        self._log_file.close()

    # -- snapshots ----------------------------------------------------------

    def snapshot(self) -> Path:
        with self._lock:
            seq = self.state.last_seq
            payload = {"schema": SNAPSHOT_SCHEMA, "seq": seq, "state": self.state.to_record()}
            path = self.snapshot_dir / f"snapshot-{seq:012d}.json"
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(payload, ensure_ascii=False), encoding="utf-8")
            tmp.replace(path)
            return path

    # -- commands -----------------------------------------------------------

    def set_config(self, config: CommunityConfig) -> int:
        return self.append("config_set", {"config": config.to_record()})

    def set_weights(self, weights: dict[str, float]) -> CommunityConfig:
        with self._lock:
            candidate = self.state.config.with_weights(weights)  # validate before appending
            self.append("weights_set", {"weights": candidate.contribution_weights})
            return self.state.config

    def add_message(self, message: ChatMessage) -> int | None:
        with self._lock:
            if message.message_id in self.state.messages:
                return None
            return self.append("message_ingested", {"message": message.to_record()})

    def record_classification(
        self, clf: Classification, author_id: str | None = None, context_size: int = 0
    ) -> int | None:
        """Append one classification outcome; returns None when the key already exists."""
        with self._lock:
            if clf.key in self.state.classifications:
                return None
            if clf.task is Task.CONTRIBUTION and clf.message_id in self.state.messages:
                if self.state.context_window(clf.message_id) and context_size == 0:
                    raise contrib.ContributionError(
                        f"contribution classification for {clf.message_id} ignored available context"
                    )
            data = {
                "message_id": clf.message_id,
                "task": clf.task.value,
                "label": clf.label,
                "scores": clf.scores,
                "backend_id": clf.backend_id,
                "model_version": clf.model_version,
                "created_at": format_instant(clf.created_at),
                "context_size": context_size,
            }
            if author_id is not None:
                data["author_id"] = author_id
            return self.append("classification_recorded", data)

    def record_abstain(self, outcome: Abstain) -> int:
        return self.append(
            "abstain_recorded",
            {
                "message_id": outcome.message_id,
                "task": outcome.task.value,
                "reason": outcome.reason,
                "raw": outcome.raw,
                "backend_id": outcome.backend_id,
                "model_version": outcome.model_version,
                "created_at": format_instant(outcome.created_at),
            },
        )

    def add_example(self, example: AnnotatedExample) -> int:
        with self._lock:
            if example.example_id in self.state.examples:
                raise DuplicateExampleError(example.example_id)
            return self.append("example_added", {"example": example_to_record(example)})

    def decide_flag(
        self,
        flag_id: str,
        verdict: str,
        moderator_id: str,
        note: str | None = None,
        label: str | None = None,
        idempotency_key: str | None = None,
        decided_at: datetime | None = None,
    ) -> tuple[modq.Flag, AnnotatedExample]:
        with self._lock:
            flag = self.state.flags.get(flag_id)
            if flag is None:
                raise modq.FlagNotFoundError(flag_id)
            if flag.state != "pending":
                raise modq.FlagConflictError(f"flag {flag_id} already {flag.state}")
            modq.curation_gold_label(flag, verdict, label)  # validate before appending
            context = [m.content for m in self.state.context_window(flag.message_id)] if (
                flag.message_id in self.state.messages
            ) else []
            seq = self.append(
                "flag_decided",
                {
                    "flag_id": flag_id,
                    "verdict": verdict,
                    "moderator_id": moderator_id,
                    "note": note,
                    "label": label,
                    "decided_at": format_instant(decided_at or utcnow()),
                    "context_texts": context,
                    "idempotency_key": idempotency_key,
                },
            )
            return self.state.flags[flag_id], self.state.examples[f"example-{seq}"]

    def decide_reward(
        self,
        reward_id: str,
        verdict: str,
        moderator_id: str,
        idempotency_key: str | None = None,
        decided_at: datetime | None = None,
    ) -> contrib.RewardRecommendation:
        if verdict not in ("approved", "rejected"):
            raise ValueError(f"verdict must be approved or rejected, got {verdict!r}")
        with self._lock:
            reward = self.state.rewards.get(reward_id)
            if reward is None:
                raise contrib.RewardNotFoundError(reward_id)
            if reward.state != "pending":
                raise contrib.RewardConflictError(f"reward {reward_id} already {reward.state}")
            self.append(
                "reward_decided",
                {
                    "reward_id": reward_id,
                    "verdict": verdict,
                    "moderator_id": moderator_id,
                    "decided_at": format_instant(decided_at or utcnow()),
                    "idempotency_key": idempotency_key,
                },
            )
            return self.state.rewards[reward_id]

    def request_audit(self, sample_size: int, rng_seed: int) -> list[str]:
        """Queue a seeded sample of moderation-classified, never-flagged messages."""
        with self._lock:
            classified = {
                mid for (mid, task, _) in self.state.classifications if task == "moderation"
            }
            candidates = sorted(classified - self.state.flagged_messages)
            sampled = modq.audit_sample(candidates, sample_size, rng_seed)
            if not sampled:
                return []
            seq = self.append(
                "audit_sampled",
                {"message_ids": sampled, "sample_size": sample_size, "seed": rng_seed},
            )
            return [f"flag-{seq}-{i}" for i in range(len(sampled))]

    def record_evaluation(self, task: Task, report: dict) -> int:
        return self.append("evaluation_recorded", {"task": Task(task).value, "report": report})

    def record_batch(self, run: dict) -> int:
        return self.append("batch_recorded", {"run": run})
