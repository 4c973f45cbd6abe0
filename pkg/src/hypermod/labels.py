"""Classification tasks and their closed label sets.

Label order is load-bearing: it drives report row order and argmax
tie-breaking, so the tuples below must never be reordered.
"""

from __future__ import annotations

from enum import Enum


class Task(str, Enum):
    INTENT = "intent"
    MODERATION = "moderation"
    CONTRIBUTION = "contribution"
    SENTIMENT = "sentiment"


LABELS: dict[Task, tuple[str, ...]] = {
    Task.INTENT: ("crypto", "fan", "casual"),
    Task.MODERATION: ("toxic", "spam", "not_toxic_not_spam"),
    Task.CONTRIBUTION: (
        "na",
        "onboarding",
        "knowledge_tcg",
        "knowledge_fan",
        "knowledge_crypto",
        "content",
        "moderation",
        "suggestion",
    ),
    Task.SENTIMENT: ("positive", "neutral", "negative"),
}

# The "nothing matched" label per task: what a rule-table backend falls back
# to, and the label treated as non-actionable downstream.
DEFAULT_LABEL: dict[Task, str] = {
    Task.INTENT: "casual",
    Task.MODERATION: "not_toxic_not_spam",
    Task.CONTRIBUTION: "na",
    Task.SENTIMENT: "neutral",
}


class UnknownLabelError(ValueError):
    """A label outside the task's closed set."""


# Hot-path lookups: keyed by both the enum member and its string value so the
# fold never pays for an Enum() conversion per event.
_LABEL_TUPLES: dict[object, tuple[str, ...]] = {}
_LABEL_SETS: dict[object, frozenset[str]] = {}
for _task, _labels in LABELS.items():
    for _key in (_task, _task.value):
        _LABEL_TUPLES[_key] = _labels
        _LABEL_SETS[_key] = frozenset(_labels)


def labels_for(task: Task) -> tuple[str, ...]:
    try:
        return _LABEL_TUPLES[task]
    except KeyError:
        raise UnknownLabelError(f"unknown task {task!r}") from None


def validate_label(task: Task, label: str) -> str:
    if label not in _LABEL_SETS[task]:
        raise UnknownLabelError(f"label {label!r} not in {task} set {_LABEL_TUPLES[task]}")
    return label


def argmax_label(task: Task, scores: dict[str, float]) -> str:
    """Highest-scoring label; ties broken by label-set order."""
    best = None
    best_score = float("-inf")
    for label in _LABEL_TUPLES[task]:
        s = scores.get(label, 0.0)
        if s > best_score:
            best, best_score = label, s
    assert best is not None
    return best
