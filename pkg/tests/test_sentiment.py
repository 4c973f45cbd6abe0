"""Sentiment bucketing: tumbling windows, partition property, score bounds."""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

import pytest

from hypermod.sentiment import bucketize

T0 = datetime(2024, 3, 10, 14, 30, tzinfo=timezone.utc)
DAY = timedelta(days=1)


def test_no_classifications_yields_no_buckets():
    assert bucketize([]) == []


def test_one_positive_one_negative_mean_zero():
    obs = [("chan-1", T0, "positive"), ("chan-1", T0 + timedelta(hours=1), "negative")]
    (bucket,) = bucketize(obs)
    assert bucket.mean_score == 0.0


def test_mixed_bucket_mean():
    obs = (
        [("c", T0, "positive")] * 3
        + [("c", T0, "neutral")]
        + [("c", T0, "negative")]
    )
    (bucket,) = bucketize(obs)
    assert bucket.mean_score == pytest.approx((3 - 1) / 5)  # 0.4


def test_windows_align_to_utc_midnight():
    (bucket,) = bucketize([("c", T0, "neutral")])
    assert bucket.window_start == datetime(2024, 3, 10, tzinfo=timezone.utc)
    assert bucket.window_end == datetime(2024, 3, 11, tzinfo=timezone.utc)


def test_channel_filter_and_all_pool():
    obs = [("a", T0, "positive"), ("b", T0, "negative")]
    pooled = bucketize(obs)
    assert len(pooled) == 1 and pooled[0].channel_id == "ALL"
    only_a = bucketize(obs, channel="a")
    assert len(only_a) == 1 and only_a[0].n_positive == 1 and only_a[0].n_negative == 0


def test_partition_property_every_observation_in_exactly_one_bucket():
    rng = random.Random(4)
    obs = [
        (
            f"chan-{rng.randrange(3)}",
            T0 + timedelta(hours=rng.randrange(24 * 14)),
            rng.choice(["positive", "neutral", "negative"]),
        )
        for _ in range(500)
    ]
    for window in (DAY, timedelta(hours=6)):
        buckets = bucketize(obs, window=window, channel=None)
        total = sum(b.n_positive + b.n_neutral + b.n_negative for b in buckets)
        assert total == len(obs)
        for b in buckets:
            assert b.window_end - b.window_start == window


def test_mean_score_bounds_and_extremes():
    rng = random.Random(5)
    for _ in range(100):
        labels = [rng.choice(["positive", "neutral", "negative"]) for _ in range(rng.randrange(1, 30))]
        buckets = bucketize([("c", T0, lab) for lab in labels])
        for b in buckets:
            assert -1.0 <= b.mean_score <= 1.0
    (all_pos,) = bucketize([("c", T0, "positive")] * 4)
    assert all_pos.mean_score == 1.0
    (all_neg,) = bucketize([("c", T0, "negative")] * 4)
    assert all_neg.mean_score == -1.0


def test_empty_bucket_mean_is_none():
    from hypermod.sentiment import SentimentBucket

    empty = SentimentBucket("c", T0, T0 + DAY, 0, 0, 0)
    assert empty.mean_score is None
    assert empty.to_record()["mean_score"] is None


def test_nonpositive_window_rejected():
    with pytest.raises(ValueError):
        bucketize([], window=timedelta(0))
