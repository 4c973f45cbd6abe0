"""Service configuration: CommunityConfig plus deployment wiring, from JSON."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .types import CommunityConfig

CONFIG_ENV = "HYPERMOD_CONFIG"
API_TOKEN_ENV = "HYPERMOD_API_TOKEN"


@dataclass(frozen=True)
class ServiceConfig:
    community: CommunityConfig = field(default_factory=CommunityConfig)
    store_dir: Path = Path("./store")
    remote_endpoint: str | None = None
    remote_model: str | None = None
    rate_limit: float = 10.0
    parallelism: int = 4

    @classmethod
    def from_record(cls, rec: dict, base_dir: Path | None = None) -> "ServiceConfig":
        store_dir = Path(rec.get("store_dir", "./store"))
        if base_dir is not None and not store_dir.is_absolute():
            store_dir = base_dir / store_dir
        return cls(
            community=CommunityConfig.from_record(rec.get("community", {})),
            store_dir=store_dir,
            remote_endpoint=rec.get("remote_endpoint"),
            remote_model=rec.get("remote_model"),
            rate_limit=float(rec.get("rate_limit", 10.0)),
            parallelism=int(rec.get("parallelism", 4)),
        )


def load_config(path: str | Path | None = None) -> ServiceConfig:
    """Load from an explicit path, else $HYPERMOD_CONFIG, else defaults."""
    if path is None:
        env = os.environ.get(CONFIG_ENV)
        if env:
            path = env
    if path is None:
        return ServiceConfig()
    path = Path(path)
    rec = json.loads(path.read_text(encoding="utf-8"))
    return ServiceConfig.from_record(rec, base_dir=path.parent)


def api_token() -> str | None:
    return os.environ.get(API_TOKEN_ENV) or None
