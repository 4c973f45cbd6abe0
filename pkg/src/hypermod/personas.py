"""User-level personas from message-level intent labels.

A user is a Crypto Enthusiast once k (default 3) of their messages are
labeled crypto, a Fan once k are labeled fan; the two can overlap. Casual
is the exclusive default for everyone else, so every active user carries
at least one persona.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from decimal import ROUND_HALF_UP, Decimal

from .labels import Task, labels_for


@dataclass
class PersonaProfile:
    author_id: str
    counts: dict[str, int] = field(default_factory=dict)
    is_crypto_enthusiast: bool = False
    is_fan: bool = False
    is_casual: bool = True
    last_updated: datetime | None = None

    def recompute_flags(self, k: int) -> None:
        self.is_crypto_enthusiast = self.counts.get("crypto", 0) >= k
        self.is_fan = self.counts.get("fan", 0) >= k
        self.is_casual = not (self.is_crypto_enthusiast or self.is_fan)

    def to_record(self) -> dict:
        return {
            "author_id": self.author_id,
            "counts": dict(self.counts),
            "is_crypto_enthusiast": self.is_crypto_enthusiast,
            "is_fan": self.is_fan,
            "is_casual": self.is_casual,
            "last_updated": None if self.last_updated is None else self.last_updated.isoformat(),
        }


def update_profile(
    profile: PersonaProfile, label: str, at: datetime, k: int
) -> PersonaProfile:
    """Tally one intent label and recompute persona flags (in place)."""
    profile.counts[label] = profile.counts.get(label, 0) + 1
    profile.last_updated = at
    profile.recompute_flags(k)
    return profile


def pct_display(part: int, whole: int) -> int:
    """Integer percent, half-up, as shown in composition reports."""
    if whole == 0:
        return 0
    return int((Decimal(part) * 100 / Decimal(whole)).quantize(Decimal("1"), ROUND_HALF_UP))


@dataclass(frozen=True)
class CompositionReport:
    active_users: int
    n_crypto: int
    n_fan: int
    n_casual: int
    pct_crypto: int
    pct_fan: int
    pct_casual: int
    message_distribution: dict[str, float]

    def to_record(self) -> dict:
        return {
            "active_users": self.active_users,
            "n_crypto": self.n_crypto,
            "n_fan": self.n_fan,
            "n_casual": self.n_casual,
            "pct_crypto": self.pct_crypto,
            "pct_fan": self.pct_fan,
            "pct_casual": self.pct_casual,
            "message_distribution": dict(self.message_distribution),
        }


def composition_report(
    profiles: dict[str, PersonaProfile], intent_label_counts: dict[str, int]
) -> CompositionReport:
    """Community composition over all profiled users.

    n_crypto and n_fan overlap; n_casual is everyone in neither group, so
    the three counts may sum to more than active_users.
    """
    active = len(profiles)
    n_crypto = sum(1 for p in profiles.values() if p.is_crypto_enthusiast)
    n_fan = sum(1 for p in profiles.values() if p.is_fan)
    n_casual = sum(1 for p in profiles.values() if p.is_casual)
    total_msgs = sum(intent_label_counts.values())
    distribution = {
        label: (intent_label_counts.get(label, 0) / total_msgs if total_msgs else 0.0)
        for label in labels_for(Task.INTENT)
    }
    return CompositionReport(
        active_users=active,
        n_crypto=n_crypto,
        n_fan=n_fan,
        n_casual=n_casual,
        pct_crypto=pct_display(n_crypto, active),
        pct_fan=pct_display(n_fan, active),
        pct_casual=pct_display(n_casual, active),
        message_distribution=distribution,
    )
