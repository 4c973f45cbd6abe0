"""Flag policy asymmetry, the decision lifecycle, and the audit sampler."""

from __future__ import annotations

import random

import pytest

from hypermod.fixtures import moderation_eval_set
from hypermod.gateway import Gateway, StubBackend
from hypermod.labels import Task
from hypermod.moderation import (
    FlagConflictError,
    FlagNotFoundError,
    FlagValidationError,
    audit_sample,
    flagged_label,
    policy_flag,
)
from hypermod.store import EventStore
from hypermod.types import Abstain, CommunityConfig

from conftest import BASE_TS, make_classification, make_message


CFG = CommunityConfig()  # tau_toxic 0.3, tau_spam 0.5


def _clf(label, scores=None):
    return make_classification("m1", Task.MODERATION, label, scores=scores)


def test_high_toxic_score_flags():
    clf = _clf("toxic", {"toxic": 0.9, "spam": 0.0, "not_toxic_not_spam": 0.1})
    flag = policy_flag(clf, CFG, "f1", 1)
    assert flag is not None and flag.predicted_label == "toxic"


def test_scores_below_both_thresholds_do_not_flag():
    clf = _clf("not_toxic_not_spam", {"toxic": 0.25, "spam": 0.1, "not_toxic_not_spam": 0.65})
    assert policy_flag(clf, CFG, "f1", 1) is None


def test_label_only_clean_does_not_flag():
    assert policy_flag(_clf("not_toxic_not_spam"), CFG, "f1", 1) is None


def test_label_only_toxic_flags_in_degraded_mode():
    flag = policy_flag(_clf("toxic"), CFG, "f1", 1)
    assert flag is not None and flag.predicted_label == "toxic"


def test_low_confidence_toxicity_flags_even_when_label_is_clean():
    clf = _clf("not_toxic_not_spam", {"toxic": 0.35, "spam": 0.0, "not_toxic_not_spam": 0.65})
    flag = policy_flag(clf, CFG, "f1", 1)
    assert flag is not None and flag.predicted_label == "toxic"


def test_abstain_becomes_needs_label_flag():
    abstain = Abstain("m1", Task.MODERATION, "parse", "raw text", "remote", "v1", BASE_TS)
    flag = policy_flag(abstain, CFG, "f1", 1)
    assert flag is not None and flag.predicted_label == "needs_label"


def test_threshold_antitonicity_on_random_corpora():
    rng = random.Random(42)
    for _ in range(500):
        toxic = round(rng.random(), 3)
        spam = round(rng.random() * (1 - toxic), 3)
        clean = max(0.0, round(1 - toxic - spam, 3))
        label = max(
            [("toxic", toxic), ("spam", spam), ("not_toxic_not_spam", clean)],
            key=lambda kv: kv[1],
        )[0]
        clf = _clf(label, {"toxic": toxic, "spam": spam, "not_toxic_not_spam": clean})
        low_tau = CommunityConfig(tau_toxic=0.2, tau_spam=0.4)
        high_tau = CommunityConfig(tau_toxic=0.5, tau_spam=0.7)
        flagged_high = flagged_label(clf, high_tau) is not None
        flagged_low = flagged_label(clf, low_tau) is not None
        if flagged_high:
            assert flagged_low  # lowering tau never removes a flag


def _flagged_store(tmp_path, name="s"):
    store = EventStore(tmp_path / name, config=CommunityConfig())
    store.add_message(make_message("m1", content="you are an idiot"))
    store.record_classification(
        _clf("toxic"), author_id="user-1"
    )
    (flag_id,) = store.state.flag_order
    return store, flag_id


def test_uphold_creates_curation_example_with_predicted_gold(tmp_path):
    store, flag_id = _flagged_store(tmp_path)
    flag, example = store.decide_flag(flag_id, "upheld", "mod-7", note="clear abuse")
    assert flag.state == "upheld"
    assert example.gold_label == "toxic"
    assert example.source == "curation"
    assert example.annotator_ids == ("mod-7",)
    assert example.text == "you are an idiot"
    store.close()


def test_overturn_creates_clean_gold(tmp_path):
    store, flag_id = _flagged_store(tmp_path)
    _, example = store.decide_flag(flag_id, "overturned", "mod-7")
    assert example.gold_label == "not_toxic_not_spam"
    store.close()


def test_double_decide_conflicts_and_state_unchanged(tmp_path):
    store, flag_id = _flagged_store(tmp_path)
    store.decide_flag(flag_id, "upheld", "mod-1")
    with pytest.raises(FlagConflictError):
        store.decide_flag(flag_id, "overturned", "mod-2")
    assert store.state.flags[flag_id].state == "upheld"
    assert store.state.flags[flag_id].decided_by == "mod-1"
    store.close()


def test_concurrent_double_decide_exactly_one_wins(tmp_path):
    import threading

    store, flag_id = _flagged_store(tmp_path)
    results = []

    def decide(moderator):
        try:
            store.decide_flag(flag_id, "upheld", moderator)
            results.append(("ok", moderator))
        except FlagConflictError:
            results.append(("conflict", moderator))

    threads = [threading.Thread(target=decide, args=(f"mod-{i}",)) for i in range(2)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(r[0] for r in results) == ["conflict", "ok"]
    store.close()


def test_unknown_flag_not_found(store):
    with pytest.raises(FlagNotFoundError):
        store.decide_flag("flag-999", "upheld", "mod-1")


def test_needs_label_uphold_requires_explicit_label(tmp_path):
    store = EventStore(tmp_path / "s", config=CommunityConfig())
    store.add_message(make_message("m1"))
    store.record_abstain(Abstain("m1", Task.MODERATION, "parse", "???", "remote", "v1", BASE_TS))
    (flag_id,) = store.state.flag_order
    with pytest.raises(FlagValidationError):
        store.decide_flag(flag_id, "upheld", "mod-1")
    flag, example = store.decide_flag(flag_id, "upheld", "mod-1", label="spam")
    assert example.gold_label == "spam"
    store.close()


def test_every_decided_flag_has_exactly_one_curation_example(tmp_path):
    store = EventStore(tmp_path / "s", config=CommunityConfig())
    for i in range(6):
        store.add_message(make_message(f"m{i}", content="free nitro here", offset_s=i))
        store.record_classification(
            make_classification(f"m{i}", Task.MODERATION, "spam"), author_id="u"
        )
    for i, flag_id in enumerate(list(store.state.flag_order)):
        store.decide_flag(flag_id, "upheld" if i % 2 else "overturned", "mod")
    curation = [e for e in store.state.examples.values() if e.source == "curation"]
    assert len(curation) == 6
    store.close()


def test_audit_sample_trivial_and_seeded_cases():
    assert audit_sample([], 5, 1) == []
    population = [f"m{i}" for i in range(7)]
    assert audit_sample(population, 7, 1) == sorted(population)
    assert audit_sample(population, 99, 1) == sorted(population)
    big = [f"m{i}" for i in range(100)]
    first = audit_sample(big, 10, 42)
    second = audit_sample(big, 10, 42)
    assert first == second and len(first) == 10
    assert audit_sample(big, 10, 43) != first


def test_audit_creates_needs_label_flags(tmp_path):
    store = EventStore(tmp_path / "s", config=CommunityConfig())
    for i in range(20):
        store.add_message(make_message(f"m{i}", content=f"fine message {i}", offset_s=i))
        store.record_classification(
            make_classification(f"m{i}", Task.MODERATION, "not_toxic_not_spam"), author_id="u"
        )
    created = store.request_audit(sample_size=5, rng_seed=9)
    assert len(created) == 5
    for flag_id in created:
        assert store.state.flags[flag_id].predicted_label == "needs_label"
    store.close()


def test_curation_burden_below_two_percent_on_labeled_fixture():
    """Stub flags on the 383-example labeled set: overturns < 2% of flags."""
    gateway = Gateway(StubBackend())
    config = CommunityConfig()
    flags = []
    for ex in moderation_eval_set():
        outcome = gateway.classify(Task.MODERATION, ex.text, message_id=ex.example_id)
        label = flagged_label(outcome, config)
        if label is not None:
            flags.append((ex, label))
    assert len(flags) == 115
    overturned = [ex for ex, _ in flags if ex.gold_label == "not_toxic_not_spam"]
    assert len(overturned) / len(flags) < 0.02


def test_asymmetric_thresholds_never_hurt_type_two_errors():
    """False negatives at default taus <= false negatives at tau=0.5."""
    gateway = Gateway(StubBackend())
    default_cfg = CommunityConfig()  # 0.3 / 0.5
    symmetric_cfg = CommunityConfig(tau_toxic=0.5, tau_spam=0.5)
    fn_default = fn_symmetric = 0
    for ex in moderation_eval_set():
        if ex.gold_label == "not_toxic_not_spam":
            continue
        outcome = gateway.classify(Task.MODERATION, ex.text, message_id=ex.example_id)
        if flagged_label(outcome, default_cfg) is None:
            fn_default += 1
        if flagged_label(outcome, symmetric_cfg) is None:
            fn_symmetric += 1
    assert fn_default <= fn_symmetric
    assert fn_default == 2 and fn_symmetric == 4
