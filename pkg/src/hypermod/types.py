"""Shared domain records: messages, classifications, gold examples, community config."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from functools import lru_cache
from typing import Any

from .labels import Task, argmax_label, validate_label


@lru_cache(maxsize=4096)  # event folds re-parse the same batch timestamps constantly
def parse_instant(value: str) -> datetime:
    """Parse an ISO-8601 instant; naive values and 'Z' suffixes are taken as UTC."""
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_instant(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class ChatMessage:
    """One community chat message. Content is persisted byte-exact as ingested."""

    message_id: str
    channel_id: str
    channel_name: str
    author_id: str
    author_name: str
    timestamp: datetime
    content: str
    reply_to: str | None = None

    def to_record(self) -> dict[str, Any]:
        rec = {
            "message_id": self.message_id,
            "channel_id": self.channel_id,
            "channel_name": self.channel_name,
            "author_id": self.author_id,
            "author_name": self.author_name,
            "timestamp": format_instant(self.timestamp),
            "content": self.content,
        }
        if self.reply_to is not None:
            rec["reply_to"] = self.reply_to
        return rec

    @classmethod
    def from_record(cls, rec: dict[str, Any]) -> "ChatMessage":
        return cls(
            message_id=str(rec["message_id"]),
            channel_id=str(rec["channel_id"]),
            channel_name=str(rec.get("channel_name", rec["channel_id"])),
            author_id=str(rec["author_id"]),
            author_name=str(rec.get("author_name", rec["author_id"])),
            timestamp=parse_instant(rec["timestamp"]),
            content=str(rec["content"]),
            reply_to=None if rec.get("reply_to") is None else str(rec["reply_to"]),
        )


@dataclass(frozen=True)
class Classification:
    """A backend's label for one message on one task."""

    message_id: str
    task: Task
    label: str
    backend_id: str
    model_version: str
    created_at: datetime
    scores: dict[str, float] | None = None

    def __post_init__(self) -> None:
        validate_label(self.task, self.label)
        if self.scores is not None:
            for lab, s in self.scores.items():
                if not 0.0 <= s <= 1.0:
                    raise ValueError(f"score for {lab!r} out of [0,1]: {s}")
                validate_label(self.task, lab)
            if argmax_label(self.task, self.scores) != self.label:
                raise ValueError("label must be the argmax of scores")

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.message_id, self.task.value, self.model_version)


@dataclass(frozen=True)
class Abstain:
    """A classify outcome the backend could not commit to; carries the raw response for audit."""

    message_id: str
    task: Task
    reason: str  # "transport" | "parse"
    raw: str
    backend_id: str
    model_version: str
    created_at: datetime


@dataclass(frozen=True)
class AnnotatedExample:
    """A gold-labeled chat text: the unit of evaluation and retraining."""

    example_id: str
    text: str
    context: tuple[str, ...]  # up to 2 preceding texts, oldest first
    task: Task
    gold_label: str
    annotator_ids: tuple[str, ...]
    split: str  # "train" | "test"
    source: str  # "human" | "bootstrap" | "curation"
    created_at: datetime | None = None

    def __post_init__(self) -> None:
        validate_label(self.task, self.gold_label)
        if len(self.context) > 2:
            raise ValueError("context holds at most 2 preceding texts")
        if self.split not in ("train", "test"):
            raise ValueError(f"bad split {self.split!r}")
        if self.source not in ("human", "bootstrap", "curation"):
            raise ValueError(f"bad source {self.source!r}")
        if not self.annotator_ids:
            raise ValueError("annotator_ids must be non-empty")


DEFAULT_CONTRIBUTION_WEIGHTS: dict[str, float] = {
    "na": 0.0,
    "onboarding": 2.0,
    "knowledge_tcg": 2.0,
    "knowledge_fan": 2.0,
    "knowledge_crypto": 2.0,
    "content": 3.0,
    "moderation": 3.0,
    "suggestion": 1.0,
}


class WeightValidationError(ValueError):
    """Contribution weights outside the allowed shape."""


def validate_weights(weights: dict[str, float]) -> dict[str, float]:
    allowed = set(DEFAULT_CONTRIBUTION_WEIGHTS)
    unknown = set(weights) - allowed
    if unknown:
        raise WeightValidationError(f"unknown contribution labels: {sorted(unknown)}")
    missing = allowed - set(weights)
    if missing:
        raise WeightValidationError(f"missing contribution labels: {sorted(missing)}")
    for label, w in weights.items():
        if w < 0:
            raise WeightValidationError(f"weight for {label!r} must be >= 0, got {w}")
    if weights["na"] != 0:
        raise WeightValidationError("weight for 'na' is fixed at 0")
    return {k: float(v) for k, v in weights.items()}


@dataclass(frozen=True)
class CommunityConfig:
    """Per-community knobs. One store (and one service instance) per community."""

    community_id: str = "default"
    bot_author_ids: frozenset[str] = frozenset()
    persona_threshold: int = 3
    tau_toxic: float = 0.3
    tau_spam: float = 0.5
    contribution_weights: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_CONTRIBUTION_WEIGHTS)
    )
    reward_threshold: float = 10.0
    decay_half_life: timedelta | None = None
    tokenizer: str = "chars_div_4"  # or "whitespace"
    price_per_1k_tokens: float = 0.002

    def __post_init__(self) -> None:
        if self.persona_threshold < 1:
            raise ValueError("persona_threshold must be >= 1")
        for name, tau in (("tau_toxic", self.tau_toxic), ("tau_spam", self.tau_spam)):
            if not 0.0 <= tau <= 1.0:
                raise ValueError(f"{name} must be in [0,1]")
        if self.reward_threshold <= 0:
            raise ValueError("reward_threshold must be > 0")
        if self.tokenizer not in ("chars_div_4", "whitespace"):
            raise ValueError(f"unknown tokenizer {self.tokenizer!r}")
        validate_weights(self.contribution_weights)

    def with_weights(self, weights: dict[str, float]) -> "CommunityConfig":
        return replace(self, contribution_weights=validate_weights(weights))

    def to_record(self) -> dict[str, Any]:
        return {
            "community_id": self.community_id,
            "bot_author_ids": sorted(self.bot_author_ids),
            "persona_threshold": self.persona_threshold,
            "tau_toxic": self.tau_toxic,
            "tau_spam": self.tau_spam,
            "contribution_weights": dict(self.contribution_weights),
            "reward_threshold": self.reward_threshold,
            "decay_half_life_s": (
                None if self.decay_half_life is None else self.decay_half_life.total_seconds()
            ),
            "tokenizer": self.tokenizer,
            "price_per_1k_tokens": self.price_per_1k_tokens,
        }

    @classmethod
    def from_record(cls, rec: dict[str, Any]) -> "CommunityConfig":
        half_life = rec.get("decay_half_life_s")
        return cls(
            community_id=rec.get("community_id", "default"),
            bot_author_ids=frozenset(rec.get("bot_author_ids", ())),
            persona_threshold=int(rec.get("persona_threshold", 3)),
            tau_toxic=float(rec.get("tau_toxic", 0.3)),
            tau_spam=float(rec.get("tau_spam", 0.5)),
            contribution_weights=dict(
                rec.get("contribution_weights", DEFAULT_CONTRIBUTION_WEIGHTS)
            ),
            reward_threshold=float(rec.get("reward_threshold", 10.0)),
            decay_half_life=None if half_life is None else timedelta(seconds=float(half_life)),
            tokenizer=rec.get("tokenizer", "chars_div_4"),
            price_per_1k_tokens=float(rec.get("price_per_1k_tokens", 0.002)),
        )
