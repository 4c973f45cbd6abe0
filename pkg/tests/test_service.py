"""HTTP surface: endpoint contracts, error bodies, idempotency, replayability."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from hypermod.config import ServiceConfig
from hypermod.fixtures import write_eval_set, intent_eval_set
from hypermod.labels import Task
from hypermod.service import AppContext, create_app
from hypermod.store import EventStore
from hypermod.types import CommunityConfig

from conftest import make_classification, make_message


@pytest.fixture
def ctx(tmp_path):
    store = EventStore(tmp_path / "store", config=CommunityConfig())
    context = AppContext(store, ServiceConfig(store_dir=tmp_path / "store"))
    yield context
    store.close()


@pytest.fixture
def client(ctx):
    app = create_app(ctx)
    with TestClient(app, raise_server_exceptions=False) as c:
        yield c


def _seed_flag(ctx, message_id="m1", content="you are an idiot"):
    ctx.store.add_message(make_message(message_id, content=content))
    ctx.store.record_classification(
        make_classification(message_id, Task.MODERATION, "toxic"), author_id="user-1"
    )
    return ctx.store.state.flag_order[-1]


def test_flags_empty_page(client):
    response = client.get("/api/flags", params={"state": "pending"})
    assert response.status_code == 200
    assert response.json() == {"items": [], "next": None}


def test_flag_page_includes_message_and_context(ctx, client):
    ctx.store.add_message(make_message("m0", content="earlier chatter", offset_s=0))
    ctx.store.add_message(make_message("m1", content="you are an idiot", offset_s=5))
    ctx.store.record_classification(
        make_classification("m1", Task.MODERATION, "toxic"), author_id="user-1"
    )
    items = client.get("/api/flags").json()["items"]
    assert len(items) == 1
    assert items[0]["message"]["content"] == "you are an idiot"
    assert items[0]["context"] == ["earlier chatter"]


def test_flag_pagination_cursor_is_stable(ctx, client):
    for i in range(5):
        _seed_flag(ctx, f"m{i}")
    first = client.get("/api/flags", params={"limit": 2}).json()
    assert len(first["items"]) == 2
    assert first["next"] is not None
    # appends between pages do not disturb the cursor
    _seed_flag(ctx, "m-late")
    second = client.get("/api/flags", params={"limit": 2, "cursor": first["next"]}).json()
    ids = [f["flag_id"] for f in first["items"] + second["items"]]
    assert len(ids) == len(set(ids)) == 4


def test_decision_roundtrip_and_conflict(ctx, client):
    flag_id = _seed_flag(ctx)
    ok = client.post(
        f"/api/flags/{flag_id}/decision",
        json={"verdict": "upheld", "moderator_id": "mod-1", "note": "clear"},
    )
    assert ok.status_code == 200
    assert ok.json()["state"] == "upheld"
    again = client.post(
        f"/api/flags/{flag_id}/decision",
        json={"verdict": "overturned", "moderator_id": "mod-2"},
    )
    assert again.status_code == 409
    body = again.json()
    assert body["code"] == "conflict" and set(body) == {"code", "message"}


def test_decision_idempotency_key_returns_first_result(ctx, client):
    flag_id = _seed_flag(ctx)
    headers = {"Idempotency-Key": "req-42"}
    first = client.post(
        f"/api/flags/{flag_id}/decision",
        json={"verdict": "upheld", "moderator_id": "mod-1"},
        headers=headers,
    )
    assert first.status_code == 200
    second = client.post(
        f"/api/flags/{flag_id}/decision",
        json={"verdict": "overturned", "moderator_id": "mod-9"},
        headers=headers,
    )
    assert second.status_code == 200
    assert second.json()["state"] == "upheld"
    assert ctx.store.state.flags[flag_id].decided_by == "mod-1"


def test_unknown_flag_404_api_error_shape(client):
    response = client.post(
        "/api/flags/flag-999/decision", json={"verdict": "upheld", "moderator_id": "m"}
    )
    assert response.status_code == 404
    assert response.json() == {
        "code": "not_found",
        "message": "no such flag: flag-999",
    }


def test_bearer_token_enforced_when_configured(ctx, monkeypatch):
    monkeypatch.setenv("HYPERMOD_API_TOKEN", "hunter2")
    flag_id = _seed_flag(ctx)
    app = create_app(ctx)
    with TestClient(app, raise_server_exceptions=False) as client:
        denied = client.post(
            f"/api/flags/{flag_id}/decision",
            json={"verdict": "upheld", "moderator_id": "mod"},
        )
        assert denied.status_code == 401
        allowed = client.post(
            f"/api/flags/{flag_id}/decision",
            json={"verdict": "upheld", "moderator_id": "mod"},
            headers={"Authorization": "Bearer hunter2"},
        )
        assert allowed.status_code == 200


def test_cost_preset_endpoint(client):
    report = client.get("/api/cost/paper").json()
    assert report["baseline_daily"] == 6000.0
    assert report["system_per_wallet"] == pytest.approx(1.3219178e-05)
    missing = client.get("/api/cost/enterprise")
    assert missing.status_code == 404


def test_cost_post_scenario(client):
    scenario = {
        "moderators": 1, "hours_per_day": 1, "hourly_rate": 1, "fte_fraction": 1.0,
        "wallets_baseline": 1, "api_daily": 0, "dev_total": 0, "amortization_days": 1,
        "overhead_daily": 0, "wallets_target": 1,
    }
    report = client.post("/api/cost", json=scenario).json()
    assert report["baseline_daily"] == 1.0
    bad = client.post("/api/cost", json={"moderators": 1})
    assert bad.status_code == 422
    assert bad.json()["code"] == "validation"


def test_weights_get_put_and_validation(client):
    weights = client.get("/api/config/weights").json()["weights"]
    assert weights["na"] == 0.0
    weights["content"] = 5.0
    updated = client.put("/api/config/weights", json={"weights": weights}).json()
    assert updated["weights"]["content"] == 5.0
    weights["na"] = 1.0
    invalid = client.put("/api/config/weights", json={"weights": weights})
    assert invalid.status_code == 422
    assert invalid.json()["code"] == "validation"


def test_agreement_endpoint(client):
    response = client.post(
        "/api/agreement", json={"grid": [["a", "a"], ["a", "b"], ["b", "b"], ["b", "b"]]}
    )
    assert response.status_code == 200
    assert response.json()["alpha"] == pytest.approx(8 / 15)
    empty = client.post("/api/agreement", json={"grid": [["a", None]]})
    assert empty.status_code == 422


def test_ingest_classify_personas_sentiment_flow(ctx, client, tmp_path):
    lines = []
    for i, (text, author) in enumerate(
        [
            ("when is the next airdrop dropping?", "u1"),
            ("that mint went fast, to the moon", "u1"),
            ("floor price looks strong today", "u1"),
            ("Hey that was a great game!", "u2"),
            ("Man that sucked", "u2"),
        ]
    ):
        lines.append(
            json.dumps(
                {
                    "message_id": f"m{i}",
                    "channel_id": "chan-1",
                    "channel_name": "general",
                    "author_id": author,
                    "author_name": author,
                    "timestamp": f"2024-01-01T00:00:{i:02d}Z",
                    "content": text,
                }
            )
        )
    export = tmp_path / "mini.jsonl"
    export.write_text("\n".join(lines) + "\n")

    report = client.post("/api/ingest", json={"path": str(export)}).json()
    assert report["retained"] == 5

    run = client.post("/api/classify/run", json={"task": "intent", "backend": "stub"}).json()
    assert run["message_count"] == 5
    client.post("/api/classify/run", json={"task": "sentiment", "backend": "stub"})

    personas = client.get("/api/personas").json()
    assert personas["report"]["active_users"] == 2
    assert personas["report"]["n_crypto"] == 1

    crypto_only = client.get("/api/personas", params={"persona": "crypto"}).json()
    assert [p["author_id"] for p in crypto_only["profiles"]] == ["u1"]

    sentiment = client.get("/api/sentiment", params={"window": "daily"}).json()
    (bucket,) = sentiment["items"]
    assert bucket["n_positive"] == 1 and bucket["n_negative"] == 1

    ranged = client.get(
        "/api/sentiment",
        params={"window": "daily", "from": "2024-02-01T00:00:00Z"},
    ).json()
    assert ranged["items"] == []


def test_evaluate_endpoint_and_metrics_cache(ctx, client, tmp_path):
    split = write_eval_set(tmp_path / "intent.jsonl", Task.INTENT, intent_eval_set())
    report = client.post(
        "/api/evaluate", json={"task": "intent", "test_split_path": str(split)}
    ).json()
    assert report["rounded"]["accuracy"] == 0.91
    cached = client.get("/api/metrics/intent").json()
    assert cached == report
    missing = client.get("/api/metrics/moderation")
    assert missing.status_code == 404


def test_export_retraining_endpoint(ctx, client):
    flag_id = _seed_flag(ctx)
    client.post(
        f"/api/flags/{flag_id}/decision", json={"verdict": "upheld", "moderator_id": "mod"}
    )
    result = client.post("/api/export/retraining", json={"task": "moderation"}).json()
    assert result["count"] == 1
    exported = [json.loads(l) for l in open(result["path"], encoding="utf-8")]
    assert exported[0]["source"] == "curation"
    assert exported[0]["gold_label"] == "toxic"


def test_rewards_endpoints(ctx, client):
    for i in range(4):
        ctx.store.add_message(
            make_message(f"c{i}", content="fan art i drew for you", author_id="artist", offset_s=i)
        )
        ctx.store.record_classification(
            make_classification(f"c{i}", Task.CONTRIBUTION, "content", offset_s=i),
            author_id="artist",
            context_size=2 if i >= 2 else i,
        )
    rewards = client.get("/api/rewards").json()["items"]
    assert len(rewards) == 1
    reward = rewards[0]
    assert reward["author_id"] == "artist" and reward["multiple"] == 1
    decided = client.post(
        f"/api/rewards/{reward['reward_id']}/decision",
        json={"verdict": "approved", "moderator_id": "mod"},
    ).json()
    assert decided["state"] == "approved"
    conflict = client.post(
        f"/api/rewards/{reward['reward_id']}/decision",
        json={"verdict": "rejected", "moderator_id": "mod"},
    )
    assert conflict.status_code == 409
    board = client.get("/api/contributions/leaderboard").json()["items"]
    assert board[0]["author_id"] == "artist"
    assert board[0]["high_water_mark"] == 1


def test_api_session_is_replayable(ctx, client, tmp_path):
    flag_id = _seed_flag(ctx)
    client.post(
        f"/api/flags/{flag_id}/decision", json={"verdict": "overturned", "moderator_id": "mod"}
    )
    weights = client.get("/api/config/weights").json()["weights"]
    weights["suggestion"] = 2.5
    client.put("/api/config/weights", json={"weights": weights})
    fingerprint = ctx.store.state.fingerprint()
    ctx.store.close()

    replayed = EventStore(ctx.store.root)
    assert replayed.state.fingerprint() == fingerprint
    replayed.close()


def test_validation_error_shape_for_bad_task(client):
    response = client.post("/api/classify/run", json={"task": "vibes"})
    assert response.status_code == 422
    assert response.json()["code"] == "validation"
