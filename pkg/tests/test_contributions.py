"""Contribution scoring, accumulation with decay, and reward emission."""

from __future__ import annotations

import random
from datetime import timedelta

import pytest

from hypermod.contributions import (
    ContributionError,
    RewardConflictError,
    ScoreLedger,
    accumulate,
    due_multiples,
    score_contribution,
)
from hypermod.labels import Task
from hypermod.store import EventStore
from hypermod.types import (
    DEFAULT_CONTRIBUTION_WEIGHTS,
    CommunityConfig,
    WeightValidationError,
)

from conftest import BASE_TS, make_classification, make_message

WEIGHTS = dict(DEFAULT_CONTRIBUTION_WEIGHTS)


def _score(label, weights=WEIGHTS, had_context=True, history=True):
    clf = make_classification("m1", Task.CONTRIBUTION, label)
    return score_contribution(clf, "u1", BASE_TS, weights, had_context, history)


def test_na_scores_nothing():
    assert _score("na") is None


def test_default_onboarding_weight_is_two():
    event = _score("onboarding")
    assert event is not None and event.weight == 2.0


def test_moderator_weight_override_applies():
    weights = dict(WEIGHTS, content=5.0)
    assert _score("content", weights).weight == 5.0


def test_missing_context_with_history_rejected():
    with pytest.raises(ContributionError):
        _score("content", had_context=False, history=True)
    # no channel history: a context-free call is legitimate
    assert _score("content", had_context=False, history=False) is not None


def test_accumulate_no_decay():
    ledger = ScoreLedger("u1")
    event = _score("onboarding")
    accumulate(ledger, event, half_life=None)
    assert ledger.score == 2.0


def test_accumulate_halflife_decay():
    ledger = ScoreLedger("u1", score=8.0, last_event_at=BASE_TS)
    clf = make_classification("m2", Task.CONTRIBUTION, "onboarding", offset_s=7 * 86400)
    event = score_contribution(
        clf, "u1", BASE_TS + timedelta(days=7), WEIGHTS, True, True
    )
    accumulate(ledger, event, half_life=timedelta(days=7))
    assert ledger.score == pytest.approx(8.0 * 0.5 + 2.0)  # = 6.0


def test_no_decay_score_is_sum_of_weights_order_free():
    rng = random.Random(3)
    labels = ["onboarding", "content", "suggestion", "moderation", "knowledge_tcg"]
    events = [
        score_contribution(
            make_classification(f"m{i}", Task.CONTRIBUTION, rng.choice(labels), offset_s=i),
            "u1",
            BASE_TS + timedelta(seconds=i),
            WEIGHTS,
            True,
            True,
        )
        for i in range(30)
    ]
    forward = ScoreLedger("u1")
    for e in events:
        accumulate(forward, e, None)
    backward = ScoreLedger("u1")
    for e in reversed(events):
        accumulate(backward, e, None)
    assert forward.score == pytest.approx(sum(e.weight for e in events))
    assert forward.score == pytest.approx(backward.score)


def test_due_multiples_boundaries():
    assert due_multiples(9.0, 10.0, 0, set()) == []
    assert due_multiples(10.0, 10.0, 0, set()) == [1]
    assert due_multiples(25.0, 10.0, 0, set()) == [1, 2]
    assert due_multiples(25.0, 10.0, 1, set()) == [2]
    assert due_multiples(25.0, 10.0, 0, {1}) == [2]


def test_exactly_eight_weightable_labels():
    assert set(DEFAULT_CONTRIBUTION_WEIGHTS) == {
        "na",
        "onboarding",
        "knowledge_tcg",
        "knowledge_fan",
        "knowledge_crypto",
        "content",
        "moderation",
        "suggestion",
    }
    assert DEFAULT_CONTRIBUTION_WEIGHTS["na"] == 0.0
    assert sum(1 for w in DEFAULT_CONTRIBUTION_WEIGHTS.values() if w > 0) == 7


def test_set_weights_validation():
    config = CommunityConfig()
    with pytest.raises(WeightValidationError):
        config.with_weights(dict(WEIGHTS, na=1.0))
    with pytest.raises(WeightValidationError):
        config.with_weights(dict(WEIGHTS, content=-2.0))
    with pytest.raises(WeightValidationError):
        config.with_weights({"content": 1.0})  # missing labels
    updated = config.with_weights(dict(WEIGHTS, suggestion=0.0))
    assert updated.contribution_weights["suggestion"] == 0.0


def _contribution_store(tmp_path, name, weights=None):
    config = CommunityConfig() if weights is None else CommunityConfig(
        contribution_weights=weights
    )
    return EventStore(tmp_path / name, config=config)


def _feed(store, label, author="u1", start=0, count=1):
    for i in range(count):
        mid = f"m{start + i}"
        store.add_message(make_message(mid, content=f"c {mid}", author_id=author, offset_s=start + i))
        store.record_classification(
            make_classification(mid, Task.CONTRIBUTION, label, offset_s=start + i),
            author_id=author,
            context_size=2,
        )


def test_weight_change_applies_only_to_future_events(tmp_path):
    store = _contribution_store(tmp_path, "s")
    _feed(store, "moderation", start=0, count=2)  # weight 3 each
    store.set_weights(dict(WEIGHTS, moderation=6.0))
    _feed(store, "moderation", start=10, count=1)  # weight 6
    events = store.state.contribution_events
    assert [e.weight for e in events] == [3.0, 3.0, 6.0]
    assert store.state.ledgers["u1"].score == 12.0
    store.close()


def test_dual_replay_with_different_weights_diverges_only_after_change(tmp_path):
    base = _contribution_store(tmp_path, "a")
    _feed(base, "moderation", start=0, count=3)
    raised = _contribution_store(tmp_path, "b")
    _feed(raised, "moderation", start=0, count=3)
    raised.set_weights(dict(WEIGHTS, moderation=6.0))
    _feed(base, "moderation", start=10, count=2)
    _feed(raised, "moderation", start=10, count=2)
    base_weights = [e.weight for e in base.state.contribution_events]
    raised_weights = [e.weight for e in raised.state.contribution_events]
    assert base_weights[:3] == raised_weights[:3] == [3.0, 3.0, 3.0]
    assert base_weights[3:] == [3.0, 3.0]
    assert raised_weights[3:] == [6.0, 6.0]
    base.close()
    raised.close()


def test_reward_recommendation_lifecycle(tmp_path):
    store = _contribution_store(tmp_path, "s")
    _feed(store, "content", count=4)  # 4 x 3.0 = 12 -> m=1 pending
    rewards = list(store.state.rewards.values())
    assert len(rewards) == 1
    reward = rewards[0]
    assert reward.multiple == 1 and reward.state == "pending"
    assert store.state.ledgers["u1"].high_water_mark == 0

    decided = store.decide_reward(reward.reward_id, "approved", "mod-1")
    assert decided.state == "approved"
    assert store.state.ledgers["u1"].high_water_mark == 1
    with pytest.raises(RewardConflictError):
        store.decide_reward(reward.reward_id, "rejected", "mod-2")
    store.close()


def test_no_duplicate_recommendation_while_pending_or_approved(tmp_path):
    store = _contribution_store(tmp_path, "s")
    _feed(store, "content", count=4)  # score 12, m=1 pending
    _feed(store, "content", start=20, count=2)  # score 18: m=1 still pending, not re-emitted
    multiples = [r.multiple for r in store.state.rewards.values()]
    assert multiples == [1]
    _feed(store, "content", start=40, count=1)  # score 21 -> m=2 joins
    multiples = sorted(r.multiple for r in store.state.rewards.values())
    assert multiples == [1, 2]
    store.close()


def test_rejected_recommendation_can_reemerge_later(tmp_path):
    store = _contribution_store(tmp_path, "s")
    _feed(store, "content", count=4)
    (reward_id,) = list(store.state.rewards)
    store.decide_reward(reward_id, "rejected", "mod-1")
    _feed(store, "content", start=30, count=1)  # next event re-examines multiples
    pending = [r for r in store.state.rewards.values() if r.state == "pending"]
    assert [r.multiple for r in pending] == [1]
    store.close()


def test_scaling_all_weights_scales_scores_and_keeps_ranking(tmp_path):
    rng = random.Random(9)
    labels = ["onboarding", "content", "suggestion", "knowledge_fan"]
    plan = [(f"u{rng.randrange(5)}", rng.choice(labels)) for _ in range(40)]

    def run(weights, name):
        store = _contribution_store(tmp_path, name, weights=weights)
        for i, (author, label) in enumerate(plan):
            _feed(store, label, author=author, start=i * 2)
        scores = {a: l.score for a, l in store.state.ledgers.items()}
        store.close()
        return scores

    base = run(dict(WEIGHTS), "base")
    scaled = run({k: v * 2.5 for k, v in WEIGHTS.items()}, "scaled")
    for author in base:
        assert scaled[author] == pytest.approx(base[author] * 2.5)
    rank = lambda scores: sorted(scores, key=lambda a: (-scores[a], a))
    assert rank(base) == rank(scaled)
