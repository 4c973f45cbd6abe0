"""Deterministic synthetic corpora for offline runs and the test suite.

Everything here is seeded and reproducible. The export corpus is engineered
so that ingesting it and running the stub backend lands on the community
figures the pipeline is sized against: 65,000 lines reducing to 59,910
retained messages across 1,121 users in 10 channels, an intent mix of ~18%
crypto / ~25% fan / rest casual, and persona counts of 343 crypto
enthusiasts, 243 fans (overlap 181), and 716 casuals.

The labeled evaluation sets realize specific confusion matrices against the
stub's rule tables: each example's text plants (or withholds) the keyword
that produces the intended predicted label, while the gold label follows the
target matrix row.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .labels import Task
from .types import CommunityConfig

EXPORT_SEED = 7

# Line budget: 65,000 total = 59,910 retained + 2,000 empty + 2,590 bot + 500 duplicate.
RETAINED = 59_910
EMPTY_LINES = 2_000
BOT_LINES = 2_590
DUPLICATE_LINES = 500
USERS = 1_121
CHANNELS = 10

# Retained-message intent mix (by stub label): the 5% "ambiguous" share has no
# keywords at all and falls to the casual default, documented community-side.
CRYPTO_MESSAGES = 10_784  # ~18.0%
FAN_MESSAGES = 14_977  # ~25.0%
AMBIGUOUS_MESSAGES = 2_996  # ~5.0%
CASUAL_KEYWORD_MESSAGES = RETAINED - CRYPTO_MESSAGES - FAN_MESSAGES - AMBIGUOUS_MESSAGES

# Persona plan: 162 crypto-only + 181 both + 62 fan-only + 716 casual = 1,121.
CRYPTO_ONLY = 162
FAN_ONLY = 62
BOTH = 181
CASUAL_USERS = USERS - CRYPTO_ONLY - FAN_ONLY - BOTH

BASE_TS = datetime(2023, 6, 1, tzinfo=timezone.utc)

CRYPTO_TEXTS = [
    "when is the next airdrop dropping?",
    "floor price looks strong today",
    "got my wallet synced before the drop",
    "new nft series on the way?",
    "token unlock schedule anyone",
    "gas fees are brutal tonight",
    "that mint went fast, to the moon",
]
FAN_TEXTS = [
    "that episode was a classic",
    "deep lore discussion tonight",
    "is that even canon though",
    "the card art this run is gorgeous",
    "the old trailer still holds up",
    "proper collector energy in here",
    "season finale predictions anyone",
]
CASUAL_TEXTS = [
    "gg everyone, great round",
    "lol that timing sucked",
    "gg wp",
    "lol nice one",
    "good game all, thanks for playing",
    "gg, same time tomorrow",
]
AMBIGUOUS_TEXTS = [
    "see you all tomorrow",
    "anyone around later?",
    "what a day",
    "same as always",
    "sure, sounds fine",
    "maybe next week then",
]
TOXIC_TEXTS = [
    "you are an idiot, seriously",
    "what a moron move that was",
    "take that garbage take elsewhere",
]
SPAM_TEXTS = [
    "free nitro at this site, trust me",
    "promo code inside, click my link now",
]
CRYPTO_KNOWLEDGE_TEXTS = [
    "gas fee breakdown for wallet ops: smart contract calls cost more",
    "keep your seed phrase off this wallet chat, use a cold wallet",
]
FAN_KNOWLEDGE_TEXTS = [
    "episode guide for new viewers is pinned, lore heavy ones marked",
    "series timeline thread updated with the new episode",
]
ONBOARDING_TEXTS = [
    "welcome to the server, grab your roles in the lobby",
    "glad to have you here, the starter guide covers the basics",
]
CONTENT_TEXTS = [
    "fan art i drew for the finale, hope you like it",
    "i made a video walking through the opening week",
]
SUGGESTION_TEXTS = [
    "what if we added a weekly quiz night",
    "feature request: pin the match schedule",
]
MODERATION_CONTRIB_TEXTS = [
    "reported a bot posting fake links in general",
    "flagged a scam account before it spread",
]
TCG_TEXTS = [
    "your mana curve is too steep for that deck",
    "draft strategy tip: force the open lane early",
]

TOXIC_SEEDED = 60
SPAM_SEEDED = 25
CRYPTO_KNOWLEDGE_SEEDED = 25
FAN_KNOWLEDGE_SEEDED = 25
ONBOARDING_SEEDED = 40
CONTENT_SEEDED = 30
SUGGESTION_SEEDED = 30
MODERATION_CONTRIB_SEEDED = 20
TCG_SEEDED = 25


def export_config() -> CommunityConfig:
    return CommunityConfig(
        community_id="dwwa-sim",
        bot_author_ids=frozenset({"bot-1", "bot-2"}),
    )


@dataclass
class ExportPlan:
    """Ground truth for the generated corpus, used as the test oracle."""

    path: Path
    lines_total: int = 65_000
    empty_lines: int = EMPTY_LINES
    bot_lines: int = BOT_LINES
    duplicate_lines: int = DUPLICATE_LINES
    retained: int = RETAINED
    channels: int = CHANNELS
    users: int = USERS
    intent_counts: dict[str, int] = field(default_factory=dict)
    n_crypto: int = CRYPTO_ONLY + BOTH
    n_fan: int = FAN_ONLY + BOTH
    n_casual: int = CASUAL_USERS
    overlap: int = BOTH
    toxic_seeded: int = TOXIC_SEEDED
    spam_seeded: int = SPAM_SEEDED
    contribution_seeded: int = (
        CRYPTO_KNOWLEDGE_SEEDED
        + FAN_KNOWLEDGE_SEEDED
        + ONBOARDING_SEEDED
        + CONTENT_SEEDED
        + SUGGESTION_SEEDED
        + MODERATION_CONTRIB_SEEDED
        + TCG_SEEDED
    )


def _user_role(u: int) -> str:
    if u < CRYPTO_ONLY:
        return "crypto_only"
    if u < CRYPTO_ONLY + FAN_ONLY:
        return "fan_only"
    if u < CRYPTO_ONLY + FAN_ONLY + BOTH:
        return "both"
    return "casual"


def _allocate(total: int, base: dict[int, int], pool: list[int]) -> dict[int, int]:
    """Round-robin the remainder of `total` over `pool` on top of `base` quotas."""
    quotas = dict(base)
    remaining = total - sum(base.values())
    if remaining < 0:
        raise ValueError("base quotas exceed the category total")
    per = remaining // len(pool)
    extra = remaining - per * len(pool)
    for i, u in enumerate(pool):
        quotas[u] = quotas.get(u, 0) + per + (1 if i < extra else 0)
    return quotas


def _build_quotas() -> tuple[dict[int, int], dict[int, int], dict[int, int], dict[int, int]]:
    crypto_users = [u for u in range(USERS) if _user_role(u) in ("crypto_only", "both")]
    fan_users = [u for u in range(USERS) if _user_role(u) in ("fan_only", "both")]
    casual_users = [u for u in range(USERS) if _user_role(u) == "casual"]
    all_users = list(range(USERS))

    # Every persona-qualifying user gets the 3-message base; sub-threshold
    # extras (at most 2) go to users who must stay out of that persona.
    crypto_base = {u: 3 for u in crypto_users}
    for u in casual_users[:200]:
        crypto_base[u] = 2
    for u in casual_users[200:350]:
        crypto_base[u] = 1
    crypto_q = _allocate(CRYPTO_MESSAGES, crypto_base, crypto_users)

    fan_base = {u: 3 for u in fan_users}
    for u in casual_users[350:450]:
        fan_base[u] = 2
    for u in casual_users[450:530]:
        fan_base[u] = 1
    for u in range(50):  # crypto-only users may chat fandom a little, below threshold
        fan_base[u] = 2
    fan_q = _allocate(FAN_MESSAGES, fan_base, fan_users)

    casual_base = {u: 1 for u in casual_users}  # every casual user stays active
    casual_q = _allocate(CASUAL_KEYWORD_MESSAGES, casual_base, all_users)
    ambiguous_q = _allocate(AMBIGUOUS_MESSAGES, {}, all_users)
    return crypto_q, fan_q, casual_q, ambiguous_q


class _Rotation:
    def __init__(self, texts: list[str]):
        self.texts = texts
        self.i = 0

    def next(self) -> str:
        text = self.texts[self.i % len(self.texts)]
        self.i += 1
        return text


def write_export(path: str | Path, seed: int = EXPORT_SEED) -> ExportPlan:
    """Write the synthetic chat export and return its ground-truth plan."""
    path = Path(path)
    rng = random.Random(seed)
    crypto_q, fan_q, casual_q, ambiguous_q = _build_quotas()

    emissions: list[tuple[int, str]] = []
    for u in range(USERS):
        emissions += [(u, "crypto")] * crypto_q.get(u, 0)
        emissions += [(u, "fan")] * fan_q.get(u, 0)
        emissions += [(u, "casual")] * casual_q.get(u, 0)
        emissions += [(u, "ambiguous")] * ambiguous_q.get(u, 0)
    assert len(emissions) == RETAINED
    rng.shuffle(emissions)

    # Targeted content: knowledge posts concentrate on a small builder pool so
    # contribution scores actually accumulate; toxic/spam ride the ambiguous slots.
    ck_left = {u: 0 for u in range(10)}
    for i in range(CRYPTO_KNOWLEDGE_SEEDED):
        ck_left[i % 10] += 1
    fk_left = {CRYPTO_ONLY + i: 0 for i in range(10)}
    for i in range(FAN_KNOWLEDGE_SEEDED):
        fk_left[CRYPTO_ONLY + (i % 10)] += 1
    first_casual = CRYPTO_ONLY + FAN_ONLY + BOTH
    casual_contrib: dict[int, list[str]] = {first_casual + i: [] for i in range(15)}
    contrib_stream = (
        [("onboarding", t) for t in _repeat(ONBOARDING_TEXTS, ONBOARDING_SEEDED)]
        + [("content", t) for t in _repeat(CONTENT_TEXTS, CONTENT_SEEDED)]
        + [("suggestion", t) for t in _repeat(SUGGESTION_TEXTS, SUGGESTION_SEEDED)]
        + [("moderation", t) for t in _repeat(MODERATION_CONTRIB_TEXTS, MODERATION_CONTRIB_SEEDED)]
        + [("knowledge_tcg", t) for t in _repeat(TCG_TEXTS, TCG_SEEDED)]
    )
    for i, (_cat, text) in enumerate(contrib_stream):
        casual_contrib[first_casual + (i % 15)].append(text)

    toxic_left = TOXIC_SEEDED
    spam_left = SPAM_SEEDED
    rotations = {
        "crypto": _Rotation(CRYPTO_TEXTS),
        "fan": _Rotation(FAN_TEXTS),
        "casual": _Rotation(CASUAL_TEXTS),
        "ambiguous": _Rotation(AMBIGUOUS_TEXTS),
        "toxic": _Rotation(TOXIC_TEXTS),
        "spam": _Rotation(SPAM_TEXTS),
        "ck": _Rotation(CRYPTO_KNOWLEDGE_TEXTS),
        "fk": _Rotation(FAN_KNOWLEDGE_TEXTS),
    }

    lines: list[str] = []
    intent_counts = {"crypto": 0, "fan": 0, "casual": 0}
    for i, (u, cat) in enumerate(emissions):
        if cat == "crypto":
            intent_counts["crypto"] += 1
            if ck_left.get(u, 0) > 0:
                ck_left[u] -= 1
                text = rotations["ck"].next()
            else:
                text = rotations["crypto"].next()
        elif cat == "fan":
            intent_counts["fan"] += 1
            if fk_left.get(u, 0) > 0:
                fk_left[u] -= 1
                text = rotations["fk"].next()
            else:
                text = rotations["fan"].next()
        elif cat == "casual":
            intent_counts["casual"] += 1
            if u in casual_contrib and casual_contrib[u]:
                text = casual_contrib[u].pop()
            else:
                text = rotations["casual"].next()
        else:  # ambiguous: keyword-free, plus the seeded toxic/spam ration
            intent_counts["casual"] += 1
            if toxic_left > 0:
                toxic_left -= 1
                text = rotations["toxic"].next()
            elif spam_left > 0:
                spam_left -= 1
                text = rotations["spam"].next()
            else:
                text = rotations["ambiguous"].next()
        ts = BASE_TS + timedelta(seconds=7 * i)
        lines.append(
            json.dumps(
                {
                    "message_id": f"m{i:06d}",
                    "channel_id": f"chan-{u % CHANNELS}",
                    "channel_name": f"channel {u % CHANNELS}",
                    "author_id": f"user-{u:04d}",
                    "author_name": f"Member {u:04d}",
                    "timestamp": ts.isoformat().replace("+00:00", "Z"),
                    "content": text,
                },
                ensure_ascii=False,
            )
        )

    retained_lines = list(lines)
    for i in range(BOT_LINES):
        ts = BASE_TS + timedelta(seconds=3 * i + 1)
        lines.append(
            json.dumps(
                {
                    "message_id": f"b{i:05d}",
                    "channel_id": f"chan-{i % CHANNELS}",
                    "channel_name": f"channel {i % CHANNELS}",
                    "author_id": f"bot-{1 + i % 2}",
                    "author_name": "HouseBot",
                    "timestamp": ts.isoformat().replace("+00:00", "Z"),
                    "content": "scheduled announcement: match lobby opens soon",
                },
                ensure_ascii=False,
            )
        )
    for i in range(EMPTY_LINES):
        ts = BASE_TS + timedelta(seconds=5 * i + 2)
        lines.append(
            json.dumps(
                {
                    "message_id": f"e{i:05d}",
                    "channel_id": f"chan-{i % CHANNELS}",
                    "channel_name": f"channel {i % CHANNELS}",
                    "author_id": f"user-{i % USERS:04d}",
                    "author_name": f"Member {i % USERS:04d}",
                    "timestamp": ts.isoformat().replace("+00:00", "Z"),
                    "content": "   " if i % 2 else "",
                },
                ensure_ascii=False,
            )
        )
    rng.shuffle(lines)
    # Duplicates re-emit earlier retained records verbatim; appended last so the
    # original always precedes its copy.
    dup_step = len(retained_lines) // DUPLICATE_LINES
    lines += [retained_lines[i * dup_step] for i in range(DUPLICATE_LINES)]

    with path.open("w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    plan = ExportPlan(path=path)
    plan.intent_counts = intent_counts
    return plan


def _repeat(texts: list[str], count: int) -> list[str]:
    return [texts[i % len(texts)] for i in range(count)]


# -- labeled evaluation sets -------------------------------------------------

NEUTRAL_FILLERS = [
    "see you at the lobby later",
    "match starts in ten minutes",
    "i will check after dinner",
    "that round went long",
    "queue is quiet this morning",
    "rosters are posted on the board",
]


@dataclass(frozen=True)
class EvalExample:
    example_id: str
    text: str
    context: tuple[str, ...]
    gold_label: str
    intended_prediction: str


def _filler(i: int) -> str:
    return NEUTRAL_FILLERS[i % len(NEUTRAL_FILLERS)]


def _realize_matrix(
    task: Task,
    counts: dict[str, dict[str, int]],
    texts_by_prediction: dict[str, list[str]],
    prefix: str,
    with_context: bool = False,
) -> list[EvalExample]:
    """Examples whose gold labels follow the matrix rows and whose texts plant
    the keyword that makes the stub predict the matrix column."""
    out: list[EvalExample] = []
    i = 0
    for gold, row in counts.items():
        for predicted, count in row.items():
            pool = texts_by_prediction[predicted]
            for _ in range(count):
                context = (_filler(i), _filler(i + 1)) if with_context else ()
                out.append(
                    EvalExample(
                        example_id=f"{prefix}-{i:04d}",
                        text=pool[i % len(pool)],
                        context=context,
                        gold_label=gold,
                        intended_prediction=predicted,
                    )
                )
                i += 1
    return out


def intent_eval_set() -> list[EvalExample]:
    """116 examples realizing the intent reference matrix
    (rows crypto/fan/casual = [33,3,5], [0,40,0], [3,0,32])."""
    counts = {
        "crypto": {"crypto": 33, "fan": 3, "casual": 5},
        "fan": {"crypto": 0, "fan": 40, "casual": 0},
        "casual": {"crypto": 3, "fan": 0, "casual": 32},
    }
    texts = {"crypto": CRYPTO_TEXTS, "fan": FAN_TEXTS, "casual": NEUTRAL_FILLERS}
    return _realize_matrix(Task.INTENT, counts, texts, "intent")


STRONG_TOXIC_EVAL = [
    "you are an idiot, full stop",
    "what a moron take",
    "trash human behavior right there",
]
WEAK_TOXIC_EVAL = ["that was pretty sus of you", "you are being annoying again"]
STRONG_SPAM_EVAL = ["free nitro giveaway, click my link", "promo code drop, click my link"]
QUOTED_TOXIC_EVAL = [
    "he kept calling me an idiot so i muted him",
    "someone said moron in voice and i reported it",
]


def moderation_eval_set() -> list[EvalExample]:
    """383 gold-labeled messages with Table-consistent supports (106/9/268).

    The stub's error pattern is engineered for the curation-burden bound:
    115 flags at default thresholds of which 2 are gold-clean (1.7%
    overturned), and exactly 2 weak-toxic messages that only thresholds
    below 0.5 can catch.
    """
    out: list[EvalExample] = []
    i = 0

    def add(text: str, gold: str, intended: str) -> None:
        nonlocal i
        out.append(
            EvalExample(
                example_id=f"mod-{i:04d}",
                text=text,
                context=(),
                gold_label=gold,
                intended_prediction=intended,
            )
        )
        i += 1

    for j in range(103):
        add(STRONG_TOXIC_EVAL[j % len(STRONG_TOXIC_EVAL)], "toxic", "toxic")
    for j in range(2):
        add(WEAK_TOXIC_EVAL[j], "toxic", "not_toxic_not_spam")  # weak signal, score 0.35
    add(_filler(0), "toxic", "not_toxic_not_spam")  # the one that gets away
    for j in range(8):
        add(STRONG_SPAM_EVAL[j % len(STRONG_SPAM_EVAL)], "spam", "spam")
    add(_filler(1), "spam", "not_toxic_not_spam")
    for j in range(2):
        add(QUOTED_TOXIC_EVAL[j], "not_toxic_not_spam", "toxic")  # quoting, not abuse
    for j in range(266):
        add(_filler(j), "not_toxic_not_spam", "not_toxic_not_spam")
    return out


def sentiment_eval_set() -> list[EvalExample]:
    """75 examples realizing the sentiment reference matrix
    (rows positive/neutral/negative = [24,8,0], [8,20,0], [0,1,14])."""
    counts = {
        "positive": {"positive": 24, "neutral": 8, "negative": 0},
        "neutral": {"positive": 8, "neutral": 20, "negative": 0},
        "negative": {"positive": 0, "neutral": 1, "negative": 14},
    }
    texts = {
        "positive": ["Hey that was a great game!", "love this community", "awesome play tonight"],
        "neutral": ["Yeah that's just the way it is.", *NEUTRAL_FILLERS],
        "negative": ["Man that sucked", "that was a terrible call", "worst queue all week"],
    }
    return _realize_matrix(Task.SENTIMENT, counts, texts, "sentiment")


def contribution_eval_set() -> list[EvalExample]:
    """211 examples (two-message context included) realizing the contribution
    reference matrix, including the all-zero moderation row (support 1)."""
    counts = {
        "na": {
            "na": 145,
            "onboarding": 3,
            "knowledge_tcg": 6,
            "knowledge_fan": 0,
            "knowledge_crypto": 1,
            "content": 0,
            "moderation": 0,
            "suggestion": 1,
        },
        "onboarding": {"na": 1, "onboarding": 9},
        "knowledge_tcg": {"na": 8, "knowledge_tcg": 8},
        "knowledge_fan": {"na": 4, "knowledge_fan": 6},
        "knowledge_crypto": {"na": 3, "knowledge_crypto": 1},
        "content": {"na": 2, "content": 5},
        "moderation": {"suggestion": 1},
        "suggestion": {"na": 0, "knowledge_fan": 3, "content": 2, "suggestion": 2},
    }
    full_counts = {
        gold: {label: row.get(label, 0) for label in LABEL_ORDER_CONTRIBUTION}
        for gold, row in counts.items()
    }
    texts = {
        "na": NEUTRAL_FILLERS,
        "onboarding": ONBOARDING_TEXTS,
        "knowledge_tcg": TCG_TEXTS,
        "knowledge_fan": FAN_KNOWLEDGE_TEXTS,
        "knowledge_crypto": CRYPTO_KNOWLEDGE_TEXTS,
        "content": CONTENT_TEXTS,
        "moderation": MODERATION_CONTRIB_TEXTS,
        "suggestion": SUGGESTION_TEXTS,
    }
    return _realize_matrix(
        Task.CONTRIBUTION, full_counts, texts, "contrib", with_context=True
    )


LABEL_ORDER_CONTRIBUTION = (
    "na",
    "onboarding",
    "knowledge_tcg",
    "knowledge_fan",
    "knowledge_crypto",
    "content",
    "moderation",
    "suggestion",
)


def write_eval_set(path: str | Path, task: Task, examples: list[EvalExample]) -> Path:
    """Write a labeled test split as line-delimited example records."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(
                json.dumps(
                    {
                        "example_id": ex.example_id,
                        "text": ex.text,
                        "context": list(ex.context),
                        "task": Task(task).value,
                        "gold_label": ex.gold_label,
                        "annotator_ids": ["fixture"],
                        "split": "test",
                        "source": "human",
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    return path


EVAL_SETS = {
    Task.INTENT: intent_eval_set,
    Task.MODERATION: moderation_eval_set,
    Task.SENTIMENT: sentiment_eval_set,
    Task.CONTRIBUTION: contribution_eval_set,
}


def persona_plan() -> list[tuple[str, dict[str, int]]]:
    """Per-user intent tallies that realize the published persona counts:
    343 crypto enthusiasts, 243 fans, overlap 181, 716 casuals."""
    plan: list[tuple[str, dict[str, int]]] = []
    for u in range(USERS):
        role = _user_role(u)
        if role == "crypto_only":
            counts = {"crypto": 3, "casual": 1}
        elif role == "fan_only":
            counts = {"fan": 3, "casual": 1}
        elif role == "both":
            counts = {"crypto": 3, "fan": 3}
        else:
            idx = u - (CRYPTO_ONLY + FAN_ONLY + BOTH)
            if idx < 200:
                counts = {"crypto": 2, "casual": 1}
            elif idx < 300:
                counts = {"fan": 2, "casual": 1}
            else:
                counts = {"casual": 1}
        plan.append((f"user-{u:04d}", counts))
    return plan
