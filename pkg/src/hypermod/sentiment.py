"""Community-pulse aggregation: sentiment labels bucketed into tumbling windows."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

ALL_CHANNELS = "ALL"

_SCORE = {"positive": 1, "neutral": 0, "negative": -1}


@dataclass(frozen=True)
class SentimentBucket:
    channel_id: str
    window_start: datetime
    window_end: datetime
    n_positive: int
    n_neutral: int
    n_negative: int

    @property
    def mean_score(self) -> float | None:
        total = self.n_positive + self.n_neutral + self.n_negative
        if total == 0:
            return None
        return (self.n_positive - self.n_negative) / total

    def to_record(self) -> dict:
        return {
            "channel_id": self.channel_id,
            "window_start": self.window_start.isoformat(),
            "window_end": self.window_end.isoformat(),
            "n_positive": self.n_positive,
            "n_neutral": self.n_neutral,
            "n_negative": self.n_negative,
            "mean_score": self.mean_score,
        }


_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def _window_start(at: datetime, window: timedelta) -> datetime:
    # Tumbling windows on a grid anchored at the UTC epoch midnight, so daily
    # windows always start at 00:00 UTC and sub-daily windows tile each day.
    at = at.astimezone(timezone.utc)
    k = (at - _EPOCH) // window
    return _EPOCH + k * window


def bucketize(
    observations: list[tuple[str, datetime, str]],
    window: timedelta = timedelta(days=1),
    channel: str | None = None,
) -> list[SentimentBucket]:
    """Group (channel_id, timestamp, sentiment_label) observations into buckets.

    Every observation lands in exactly one window; empty windows are not
    emitted. channel=None pools everything under ALL.
    """
    if window <= timedelta(0):
        raise ValueError("window size must be positive")
    counts: dict[tuple[str, datetime], list[int]] = {}
    for channel_id, at, label in observations:
        if channel is not None and channel_id != channel:
            continue
        if label not in _SCORE:
            raise ValueError(f"unknown sentiment label {label!r}")
        bucket_channel = channel_id if channel is not None else ALL_CHANNELS
        start = _window_start(at, window)
        cell = counts.setdefault((bucket_channel, start), [0, 0, 0])
        cell[("positive", "neutral", "negative").index(label)] += 1
    buckets = [
        SentimentBucket(
            channel_id=ch,
            window_start=start,
            window_end=start + window,
            n_positive=pos,
            n_neutral=neu,
            n_negative=neg,
        )
        for (ch, start), (pos, neu, neg) in counts.items()
    ]
    buckets.sort(key=lambda b: (b.channel_id, b.window_start))
    return buckets
