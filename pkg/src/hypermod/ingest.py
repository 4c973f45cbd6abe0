"""Chat-export ingestion: parse, filter, count, and load into the store.

Input is UTF-8 line-delimited JSON records with the ChatMessage fields;
unknown extra fields are ignored. Malformed lines go to a `<input>.errors`
sidecar (line_no<TAB>reason) and ingestion continues, unless more than 10%
of lines are malformed, which aborts the run.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .store import EventStore
from .types import ChatMessage

MALFORMED_ABORT_RATIO = 0.10
REQUIRED_FIELDS = ("message_id", "channel_id", "author_id", "timestamp", "content")

# Hook for vendor export schemas: receives the raw parsed record and returns
# one shaped like our line schema (REQUIRED_FIELDS present). The default is
# the identity: records already carry our field names.
RecordConverter = Callable[[dict], dict]


class IngestError(RuntimeError):
    pass


@dataclass(frozen=True)
class IngestReport:
    total_read: int
    empty_dropped: int
    bot_dropped: int
    duplicates_dropped: int
    retained: int
    channels: int
    active_users: int

    def to_record(self) -> dict:
        return {
            "total_read": self.total_read,
            "empty_dropped": self.empty_dropped,
            "bot_dropped": self.bot_dropped,
            "duplicates_dropped": self.duplicates_dropped,
            "retained": self.retained,
            "channels": self.channels,
            "active_users": self.active_users,
        }


def estimate_tokens(text: str, tokenizer: str = "chars_div_4") -> int:
    """Deterministic token-count proxy for cost accounting.

    chars_div_4 is ceil(unicode scalar count / 4); whitespace counts
    whitespace-separated words.
    """
    if tokenizer == "chars_div_4":
        return math.ceil(len(text) / 4)
    if tokenizer == "whitespace":
        return len(text.split())
    raise ValueError(f"unknown tokenizer {tokenizer!r}")


def _parse_line(line: str, converter: RecordConverter | None) -> ChatMessage:
    rec = json.loads(line)
    if not isinstance(rec, dict):
        raise ValueError("record is not an object")
    if converter is not None:
        rec = converter(rec)
    missing = [f for f in REQUIRED_FIELDS if f not in rec]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")
    return ChatMessage.from_record(rec)


def parse_export(
    path: str | Path, store: EventStore, converter: RecordConverter | None = None
) -> IngestReport:
    """Ingest one export file into the store and return the tally.

    Filters, in order per line: malformed (sidecar), empty content (after a
    whitespace trim that never touches the persisted text), configured bot
    authors, duplicate message_ids (first occurrence wins, including ids
    already in the store). Channel/user counts cover retained messages only.
    """
    path = Path(path)
    config = store.state.config
    errors: list[tuple[int, str]] = []
    total_read = empty = bots = dups = retained = 0
    total_lines = 0
    channels: set[str] = set()
    users: set[str] = set()
    seen_ids: set[str] = set()

    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            total_lines += 1
            try:
                msg = _parse_line(line.rstrip("\n"), converter)
            except (ValueError, KeyError) as exc:
                errors.append((line_no, str(exc)))
                continue
            total_read += 1
            if not msg.content.strip():
                empty += 1
                continue
            if msg.author_id in config.bot_author_ids:
                bots += 1
                continue
            if msg.message_id in seen_ids or msg.message_id in store.state.messages:
                dups += 1
                continue
            seen_ids.add(msg.message_id)
            store.add_message(msg)
            retained += 1
            channels.add(msg.channel_id)
            users.add(msg.author_id)

    if errors:
        sidecar = path.with_name(path.name + ".errors")
        with sidecar.open("w", encoding="utf-8") as fh:
            for line_no, reason in errors:
                fh.write(f"{line_no}\t{reason}\n")
    if total_lines and len(errors) / total_lines > MALFORMED_ABORT_RATIO:
        raise IngestError(
            f"{len(errors)}/{total_lines} lines malformed (> {MALFORMED_ABORT_RATIO:.0%}); "
            f"see {path.name}.errors"
        )

    return IngestReport(
        total_read=total_read,
        empty_dropped=empty,
        bot_dropped=bots,
        duplicates_dropped=dups,
        retained=retained,
        channels=len(channels),
        active_users=len(users),
    )
