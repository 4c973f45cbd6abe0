#!/usr/bin/env python3
"""Seed a small store for the console integration tests.

Usage: seed_store.py <root_dir>

Creates <root_dir>/store with pending flags (toxic messages with context),
a pending reward recommendation, persona and sentiment data, and writes
<root_dir>/more.jsonl: a follow-up export whose contribution messages land
after a weight change, so leaderboard deltas are observable.
"""

import json
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

from hypermod.gateway import Gateway, StubBackend
from hypermod.labels import Task
from hypermod.pipeline import classify_store
from hypermod.store import EventStore
from hypermod.types import ChatMessage, CommunityConfig

BASE = datetime(2024, 2, 1, tzinfo=timezone.utc)


def msg(i, content, author="user-1", channel="chan-1"):
    return ChatMessage(
        message_id=f"seed-{i:03d}",
        channel_id=channel,
        channel_name=channel,
        author_id=author,
        author_name=author,
        timestamp=BASE + timedelta(minutes=i),
        content=content,
    )


def main() -> None:
    root = Path(sys.argv[1])
    root.mkdir(parents=True, exist_ok=True)
    store = EventStore(root / "store", config=CommunityConfig(community_id="console-it"))

    texts = [
        ("we are queueing in five", "user-1"),
        ("bring the new deck", "user-2"),
        ("you are an idiot, seriously", "user-3"),
        ("what a moron move that was", "user-3"),
        ("free nitro at this site, trust me", "user-4"),
        ("Hey that was a great game!", "user-1"),
        ("Man that sucked", "user-2"),
        ("when is the next airdrop dropping?", "user-5"),
        ("floor price looks strong today", "user-5"),
        ("that mint went fast, to the moon", "user-5"),
        ("fan art i drew for the finale, hope you like it", "artist"),
        ("i made a video walking through the opening week", "artist"),
        ("fan art i drew for the badge set", "artist"),
        ("i made a video on deck openings", "artist"),
    ]
    for i, (content, author) in enumerate(texts):
        store.add_message(msg(i, content, author))

    gateway = Gateway(StubBackend())
    for task in Task:
        classify_store(store, gateway, task)
    store.close()

    # follow-up export: two more contribution posts from the same author,
    # ingested by the tests *after* the weight change
    more = [
        msg(100 + j, content, "artist").to_record()
        for j, content in enumerate(
            ["fan art i drew of the tardis interior", "i made a video about trading etiquette"]
        )
    ]
    with (root / "more.jsonl").open("w", encoding="utf-8") as fh:
        for rec in more:
            fh.write(json.dumps(rec) + "\n")

    (root / "config.json").write_text(
        json.dumps({"store_dir": str(root / "store"), "community": {"community_id": "console-it"}})
    )
    print(json.dumps({"root": str(root)}))


if __name__ == "__main__":
    main()
