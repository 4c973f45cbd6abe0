"""Flagging policy and the moderator decision lifecycle.

The policy is deliberately asymmetric: a toxic message slipping through
costs far more than a spurious flag costs a moderator, so score thresholds
default low for toxic (0.3) and can fire even when the backend's argmax
label is clean.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import datetime

from .labels import Task
from .types import Abstain, AnnotatedExample, Classification, CommunityConfig

FLAGGABLE = ("toxic", "spam")
NEEDS_LABEL = "needs_label"
CLEAN = "not_toxic_not_spam"


class FlagNotFoundError(KeyError):
    pass


class FlagConflictError(RuntimeError):
    """The flag was already decided."""


class FlagValidationError(ValueError):
    pass


@dataclass
class Flag:
    flag_id: str
    message_id: str
    predicted_label: str  # toxic | spam | needs_label
    scores: dict[str, float] | None = None
    state: str = "pending"  # pending | upheld | overturned
    decided_by: str | None = None
    decided_at: datetime | None = None
    note: str | None = None
    created_seq: int = 0

    def to_record(self) -> dict:
        return {
            "flag_id": self.flag_id,
            "message_id": self.message_id,
            "predicted_label": self.predicted_label,
            "scores": None if self.scores is None else dict(self.scores),
            "state": self.state,
            "decided_by": self.decided_by,
            "decided_at": None if self.decided_at is None else self.decided_at.isoformat(),
            "note": self.note,
            "created_seq": self.created_seq,
        }


def flagged_label(outcome: Classification, config: CommunityConfig) -> str | None:
    """The label a moderation classification should be flagged under, or None.

    With scores: fire when scores[toxic] >= tau_toxic or scores[spam] >= tau_spam,
    toxic taking precedence. Without scores the policy degrades to flagging the
    predicted label itself when it is toxic or spam.
    """
    if outcome.task is not Task.MODERATION:
        raise FlagValidationError("flag policy applies to moderation classifications only")
    if outcome.scores is not None:
        if outcome.scores.get("toxic", 0.0) >= config.tau_toxic:
            return "toxic"
        if outcome.scores.get("spam", 0.0) >= config.tau_spam:
            return "spam"
        return None
    return outcome.label if outcome.label in FLAGGABLE else None


def policy_flag(
    outcome: Classification | Abstain, config: CommunityConfig, flag_id: str, created_seq: int
) -> Flag | None:
    """Build the flag a moderation outcome warrants, if any. Abstain always flags."""
    if isinstance(outcome, Abstain):
        return Flag(
            flag_id=flag_id,
            message_id=outcome.message_id,
            predicted_label=NEEDS_LABEL,
            created_seq=created_seq,
        )
    label = flagged_label(outcome, config)
    if label is None:
        return None
    return Flag(
        flag_id=flag_id,
        message_id=outcome.message_id,
        predicted_label=label,
        scores=None if outcome.scores is None else dict(outcome.scores),
        created_seq=created_seq,
    )


def curation_gold_label(flag: Flag, verdict: str, label: str | None) -> str:
    """Gold label the decided flag contributes back for retraining."""
    if verdict not in ("upheld", "overturned"):
        raise FlagValidationError(f"verdict must be upheld or overturned, got {verdict!r}")
    if label is not None and flag.predicted_label != NEEDS_LABEL:
        raise FlagValidationError("explicit labels are only for needs_label flags")
    if verdict == "overturned":
        return CLEAN
    if flag.predicted_label == NEEDS_LABEL:
        if label not in FLAGGABLE:
            raise FlagValidationError(
                "upholding a needs_label flag requires label toxic or spam"
            )
        return label
    return flag.predicted_label


def apply_decision(
    flag: Flag,
    verdict: str,
    moderator_id: str,
    decided_at: datetime,
    note: str | None,
    label: str | None,
    message_text: str,
    message_context: tuple[str, ...],
    example_id: str,
) -> AnnotatedExample:
    """Transition a pending flag and mint its curation example (exactly one per decision)."""
    if flag.state != "pending":
        raise FlagConflictError(f"flag {flag.flag_id} already {flag.state}")
    gold = curation_gold_label(flag, verdict, label)
    flag.state = verdict
    flag.decided_by = moderator_id
    flag.decided_at = decided_at
    flag.note = note
    return AnnotatedExample(
        example_id=example_id,
        text=message_text,
        context=message_context,
        task=Task.MODERATION,
        gold_label=gold,
        annotator_ids=(moderator_id,),
        split="train",
        source="curation",
        created_at=decided_at,
    )


def audit_sample(candidates: list[str], sample_size: int, rng_seed: int) -> list[str]:
    """Seeded uniform sample of unflagged message ids for Type-II spot checks.

    Asking for more than the population returns the whole population.
    """
    ordered = sorted(candidates)
    if sample_size >= len(ordered):
        return ordered
    return sorted(random.Random(rng_seed).sample(ordered, sample_size))
