from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from hypermod.gateway import Gateway, StubBackend
from hypermod.store import EventStore
from hypermod.types import ChatMessage, Classification, CommunityConfig

BASE_TS = datetime(2024, 1, 1, tzinfo=timezone.utc)


@pytest.fixture(scope="session")
def stub_backend() -> StubBackend:
    return StubBackend()


@pytest.fixture
def gateway(stub_backend) -> Gateway:
    return Gateway(stub_backend)


@pytest.fixture
def store(tmp_path) -> EventStore:
    s = EventStore(tmp_path / "store", config=CommunityConfig())
    yield s
    s.close()


def make_message(
    message_id: str,
    content: str = "hello there",
    channel_id: str = "chan-1",
    author_id: str = "user-1",
    offset_s: int = 0,
) -> ChatMessage:
    return ChatMessage(
        message_id=message_id,
        channel_id=channel_id,
        channel_name=channel_id,
        author_id=author_id,
        author_name=author_id,
        timestamp=BASE_TS + timedelta(seconds=offset_s),
        content=content,
    )


def make_classification(
    message_id: str,
    task,
    label: str,
    scores: dict[str, float] | None = None,
    model_version: str = "stub-1",
    offset_s: int = 0,
) -> Classification:
    return Classification(
        message_id=message_id,
        task=task,
        label=label,
        scores=scores,
        backend_id="stub",
        model_version=model_version,
        created_at=BASE_TS + timedelta(seconds=offset_s),
    )
