"""Weighted contribution scoring, per-user accumulation, and reward recommendations.

Each scoring label carries a moderator-tunable weight; scores build over time
(optionally decaying with a half-life) and every time a user's running total
crosses a fresh multiple of the reward threshold, one recommendation goes to
the moderator queue. The high-water mark only advances on approval.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta

from .labels import Task
from .types import Classification


class ContributionError(ValueError):
    pass


class RewardNotFoundError(KeyError):
    pass


class RewardConflictError(RuntimeError):
    pass


@dataclass(frozen=True)
class ContributionEvent:
    message_id: str
    author_id: str
    label: str
    weight: float
    occurred_at: datetime

    def to_record(self) -> dict:
        return {
            "message_id": self.message_id,
            "author_id": self.author_id,
            "label": self.label,
            "weight": self.weight,
            "occurred_at": self.occurred_at.isoformat(),
        }


@dataclass
class ScoreLedger:
    author_id: str
    score: float = 0.0
    high_water_mark: int = 0
    last_event_at: datetime | None = None
    event_count: int = 0

    def to_record(self) -> dict:
        return {
            "author_id": self.author_id,
            "score": self.score,
            "high_water_mark": self.high_water_mark,
            "last_event_at": None if self.last_event_at is None else self.last_event_at.isoformat(),
            "event_count": self.event_count,
        }


@dataclass
class RewardRecommendation:
    reward_id: str
    author_id: str
    trigger_score: float
    multiple: int
    state: str = "pending"  # pending | approved | rejected
    decided_by: str | None = None
    decided_at: datetime | None = None
    created_seq: int = 0

    def to_record(self) -> dict:
        return {
            "reward_id": self.reward_id,
            "author_id": self.author_id,
            "trigger_score": self.trigger_score,
            "multiple": self.multiple,
            "state": self.state,
            "decided_by": self.decided_by,
            "decided_at": None if self.decided_at is None else self.decided_at.isoformat(),
            "created_seq": self.created_seq,
        }


def score_contribution(
    outcome: Classification,
    author_id: str,
    occurred_at: datetime,
    weights: dict[str, float],
    had_context: bool,
    channel_has_history: bool,
) -> ContributionEvent | None:
    """Turn a contribution classification into a weighted event; na scores nothing.

    The classifier must have seen the two-message context whenever the channel
    had one; a context-less call against available history is rejected rather
    than silently scored.
    """
    if outcome.task is not Task.CONTRIBUTION:
        raise ContributionError("scoring applies to contribution classifications only")
    if channel_has_history and not had_context:
        raise ContributionError(
            f"classification for {outcome.message_id} was made without available context"
        )
    if outcome.label == "na":
        return None
    return ContributionEvent(
        message_id=outcome.message_id,
        author_id=author_id,
        label=outcome.label,
        weight=weights[outcome.label],
        occurred_at=occurred_at,
    )


def accumulate(
    ledger: ScoreLedger, event: ContributionEvent, half_life: timedelta | None
) -> ScoreLedger:
    """S' = S * 2^(-dt/half_life) + weight (decay factor 1 when no half-life)."""
    if event.author_id != ledger.author_id:
        raise ContributionError("event author does not match ledger")
    decay = 1.0
    if half_life is not None and ledger.last_event_at is not None:
        dt = (event.occurred_at - ledger.last_event_at).total_seconds()
        decay = 2.0 ** (-dt / half_life.total_seconds())
    ledger.score = ledger.score * decay + event.weight
    ledger.last_event_at = event.occurred_at
    ledger.event_count += 1
    return ledger


def due_multiples(
    score: float, reward_threshold: float, high_water_mark: int, blocked: set[int]
) -> list[int]:
    """Multiples m with m*R <= S, above the high-water mark, and not already
    pending or approved."""
    if reward_threshold <= 0:
        raise ContributionError("reward threshold must be > 0")
    top = int(score // reward_threshold)
    return [m for m in range(high_water_mark + 1, top + 1) if m not in blocked]
