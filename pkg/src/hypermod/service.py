"""HTTP surface for the curation console and scripts.

Every non-2xx response body is exactly one error object {code, message}.
Mutating endpoints write through the store's single writer, so a full API
session is replayable from the event log. Decision endpoints honor
Idempotency-Key headers; a replayed key returns the original outcome
instead of a conflict.
"""

from __future__ import annotations

from datetime import timedelta
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import costs
from .agreement import NoPairableValuesError, krippendorff_alpha
from .config import ServiceConfig, api_token
from .contributions import RewardConflictError, RewardNotFoundError
from .gateway import Gateway, RemoteBackend, StubBackend
from .ingest import IngestError, parse_export
from .labels import Task, UnknownLabelError
from .moderation import FlagConflictError, FlagNotFoundError, FlagValidationError
from .personas import composition_report
from .pipeline import (
    classify_store,
    evaluate_and_record,
    export_retraining,
    leaderboard,
    sentiment_series,
)
from .store import EventStore
from .types import WeightValidationError, parse_instant


class ApiException(Exception):
    def __init__(self, code: str, message: str, status: int):
        self.code = code
        self.message = message
        self.status = status


def _not_found(message: str) -> ApiException:
    return ApiException("not_found", message, 404)


def _conflict(message: str) -> ApiException:
    return ApiException("conflict", message, 409)


def _validation(message: str) -> ApiException:
    return ApiException("validation", message, 422)


class IngestBody(BaseModel):
    path: str


class ClassifyBody(BaseModel):
    task: str
    backend: str = "stub"
    parallelism: int | None = None


class DecisionBody(BaseModel):
    verdict: str
    moderator_id: str
    note: str | None = None
    label: str | None = None


class RewardDecisionBody(BaseModel):
    verdict: str
    moderator_id: str


class EvaluateBody(BaseModel):
    task: str
    test_split_path: str | None = None


class AgreementBody(BaseModel):
    grid: list[list[str | None]]


class WeightsBody(BaseModel):
    weights: dict[str, float]


class ExportBody(BaseModel):
    task: str
    source: str = "curation"
    from_: str | None = None

    model_config = {"populate_by_name": True}

    def __init__(self, **data: Any):
        if "from" in data:
            data["from_"] = data.pop("from")
        super().__init__(**data)


class AppContext:
    def __init__(self, store: EventStore, config: ServiceConfig):
        self.store = store
        self.config = config
        community = store.state.config
        self.stub_gateway = Gateway(
            StubBackend(),
            rate_limit=None,
            tokenizer=community.tokenizer,
            price_per_1k_tokens=community.price_per_1k_tokens,
        )
        self._remote_gateway: Gateway | None = None

    def gateway(self, backend: str) -> Gateway:
        if backend == "stub":
            return self.stub_gateway
        if backend == "remote":
            if self.config.remote_endpoint is None or self.config.remote_model is None:
                raise ApiException(
                    "backend_unavailable", "remote backend is not configured", 503
                )
            if self._remote_gateway is None:
                community = self.store.state.config
                self._remote_gateway = Gateway(
                    RemoteBackend(self.config.remote_endpoint, self.config.remote_model),
                    rate_limit=self.config.rate_limit,
                    tokenizer=community.tokenizer,
                    price_per_1k_tokens=community.price_per_1k_tokens,
                )
            return self._remote_gateway
        raise _validation(f"unknown backend {backend!r}")


def _task(value: str) -> Task:
    try:
        return Task(value)
    except ValueError:
        raise _validation(f"unknown task {value!r}") from None


def _flag_payload(ctx: AppContext, flag) -> dict:
    payload = flag.to_record()
    message = ctx.store.state.messages.get(flag.message_id)
    if message is not None:
        payload["message"] = {
            "content": message.content,
            "author_id": message.author_id,
            "channel_id": message.channel_id,
            "timestamp": message.timestamp.isoformat(),
        }
        payload["context"] = [m.content for m in ctx.store.state.context_window(flag.message_id)]
    else:
        payload["message"] = None
        payload["context"] = []
    return payload


def _reward_payload(ctx: AppContext, reward) -> dict:
    payload = reward.to_record()
    ledger = ctx.store.state.ledgers.get(reward.author_id)
    payload["current_score"] = ledger.score if ledger else 0.0
    payload["recent_events"] = [
        e.to_record()
        for e in ctx.store.state.contribution_events
        if e.author_id == reward.author_id
    ][-5:]
    return payload


def create_app(ctx: AppContext) -> FastAPI:
    app = FastAPI(title="hypermod", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiException)
    async def handle_api_exception(_request: Request, exc: ApiException):
        return JSONResponse({"code": exc.code, "message": exc.message}, status_code=exc.status)

    @app.exception_handler(RequestValidationError)
    async def handle_validation(_request: Request, exc: RequestValidationError):
        return JSONResponse({"code": "validation", "message": str(exc)}, status_code=422)

    @app.exception_handler(Exception)
    async def handle_internal(_request: Request, exc: Exception):
        return JSONResponse({"code": "internal", "message": str(exc)}, status_code=500)

    def require_moderator(authorization: str | None) -> None:
        token = api_token()
        if token is None:
            return
        if authorization != f"Bearer {token}":
            raise ApiException("validation", "missing or invalid bearer token", 401)

    @app.post("/api/ingest")
    def api_ingest(body: IngestBody):
        path = Path(body.path)
        if not path.exists():
            raise _not_found(f"no such export file: {path}")
        try:
            report = parse_export(path, ctx.store)
        except IngestError as exc:
            raise _validation(str(exc)) from exc
        return report.to_record()

    @app.post("/api/classify/run")
    def api_classify(body: ClassifyBody):
        task = _task(body.task)
        gateway = ctx.gateway(body.backend)
        parallelism = body.parallelism or ctx.config.parallelism
        if parallelism < 1:
            raise _validation("parallelism must be >= 1")
        run = classify_store(ctx.store, gateway, task, parallelism=parallelism)
        return run.to_record()

    @app.get("/api/flags")
    def api_flags(state: str = "pending", limit: int = 50, cursor: int = 0):
        if state not in ("pending", "upheld", "overturned", "all"):
            raise _validation(f"unknown flag state {state!r}")
        if limit < 1:
            raise _validation("limit must be >= 1")
        order = ctx.store.state.flag_order
        items = []
        next_cursor = None
        for pos in range(cursor, len(order)):
            flag = ctx.store.state.flags[order[pos]]
            if state != "all" and flag.state != state:
                continue
            if len(items) == limit:
                next_cursor = pos
                break
            payload = _flag_payload(ctx, flag)
            payload["cursor"] = pos + 1
            items.append(payload)
        return {"items": items, "next": next_cursor}

    @app.post("/api/flags/{flag_id}/decision")
    def api_decide_flag(
        flag_id: str,
        body: DecisionBody,
        authorization: str | None = Header(default=None),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ):
        require_moderator(authorization)
        if idempotency_key and idempotency_key in ctx.store.state.idempotency:
            prior = ctx.store.state.idempotency[idempotency_key]
            flag = ctx.store.state.flags[prior["id"]]
            return _flag_payload(ctx, flag)
        try:
            flag, example = ctx.store.decide_flag(
                flag_id,
                verdict=body.verdict,
                moderator_id=body.moderator_id,
                note=body.note,
                label=body.label,
                idempotency_key=idempotency_key,
            )
        except FlagNotFoundError:
            raise _not_found(f"no such flag: {flag_id}") from None
        except FlagConflictError as exc:
            raise _conflict(str(exc)) from None
        except (FlagValidationError, UnknownLabelError) as exc:
            raise _validation(str(exc)) from None
        payload = _flag_payload(ctx, flag)
        payload["curation_example_id"] = example.example_id
        return payload

    @app.get("/api/personas")
    def api_personas(persona: str | None = None, limit: int = 50, cursor: int = 0):
        state = ctx.store.state
        report = composition_report(state.profiles, state.intent_label_counts)
        selected = []
        for author_id in sorted(state.profiles):
            profile = state.profiles[author_id]
            if persona == "crypto" and not profile.is_crypto_enthusiast:
                continue
            if persona == "fan" and not profile.is_fan:
                continue
            if persona == "casual" and not profile.is_casual:
                continue
            if persona not in (None, "crypto", "fan", "casual"):
                raise _validation(f"unknown persona {persona!r}")
            selected.append(profile.to_record())
        page = selected[cursor : cursor + limit]
        next_cursor = cursor + limit if cursor + limit < len(selected) else None
        return {"report": report.to_record(), "profiles": page, "next": next_cursor}

    @app.get("/api/contributions/leaderboard")
    def api_leaderboard(limit: int = 20):
        return {"items": leaderboard(ctx.store, limit=limit)}

    @app.get("/api/rewards")
    def api_rewards(state: str = "pending"):
        if state not in ("pending", "approved", "rejected", "all"):
            raise _validation(f"unknown reward state {state!r}")
        items = [
            _reward_payload(ctx, ctx.store.state.rewards[rid])
            for rid in ctx.store.state.reward_order
            if state == "all" or ctx.store.state.rewards[rid].state == state
        ]
        return {"items": items}

    @app.post("/api/rewards/{reward_id}/decision")
    def api_decide_reward(
        reward_id: str,
        body: RewardDecisionBody,
        authorization: str | None = Header(default=None),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ):
        require_moderator(authorization)
        if idempotency_key and idempotency_key in ctx.store.state.idempotency:
            prior = ctx.store.state.idempotency[idempotency_key]
            return _reward_payload(ctx, ctx.store.state.rewards[prior["id"]])
        try:
            reward = ctx.store.decide_reward(
                reward_id,
                verdict=body.verdict,
                moderator_id=body.moderator_id,
                idempotency_key=idempotency_key,
            )
        except RewardNotFoundError:
            raise _not_found(f"no such reward: {reward_id}") from None
        except RewardConflictError as exc:
            raise _conflict(str(exc)) from None
        except ValueError as exc:
            raise _validation(str(exc)) from None
        return _reward_payload(ctx, reward)

    @app.get("/api/sentiment")
    def api_sentiment(request: Request):
        # `from`/`to` clash with Python keywords, so read the query string directly.
        params = request.query_params
        channel = params.get("channel")
        window_name = params.get("window", "daily")
        windows = {"daily": timedelta(days=1), "hourly": timedelta(hours=1)}
        if window_name not in windows:
            raise _validation(f"unknown window {window_name!r}")
        since = params.get("from")
        until = params.get("to")
        try:
            since_dt = parse_instant(since) if since else None
            until_dt = parse_instant(until) if until else None
        except ValueError as exc:
            raise _validation(f"bad timestamp: {exc}") from None
        buckets = sentiment_series(
            ctx.store, windows[window_name], channel=channel, since=since_dt, until=until_dt
        )
        return {"items": [b.to_record() for b in buckets]}

    @app.post("/api/evaluate")
    def api_evaluate(body: EvaluateBody):
        task = _task(body.task)
        if body.test_split_path is not None and not Path(body.test_split_path).exists():
            raise _not_found(f"no such test split: {body.test_split_path}")
        try:
            record = evaluate_and_record(
                ctx.store, ctx.stub_gateway, task, body.test_split_path
            )
        except (ValueError, UnknownLabelError) as exc:
            raise _validation(str(exc)) from None
        return record

    @app.get("/api/metrics/{task}")
    def api_metrics(task: str):
        t = _task(task)
        record = ctx.store.state.last_reports.get(t.value)
        if record is None:
            raise _not_found(f"no evaluation recorded for task {t.value}")
        return record

    @app.post("/api/agreement")
    def api_agreement(body: AgreementBody):
        try:
            report = krippendorff_alpha(body.grid)
        except NoPairableValuesError as exc:
            raise _validation(str(exc)) from None
        return report.to_record()

    @app.get("/api/config/weights")
    def api_get_weights():
        config = ctx.store.state.config
        return {
            "community_id": config.community_id,
            "weights": dict(config.contribution_weights),
        }

    @app.put("/api/config/weights")
    def api_put_weights(
        body: WeightsBody, authorization: str | None = Header(default=None)
    ):
        require_moderator(authorization)
        try:
            ctx.store.set_weights(body.weights)
        except WeightValidationError as exc:
            raise _validation(str(exc)) from None
        config = ctx.store.state.config
        return {
            "community_id": config.community_id,
            "weights": dict(config.contribution_weights),
        }

    @app.get("/api/cost/{preset_name}")
    def api_cost_preset(preset_name: str):
        try:
            scenario = costs.preset(preset_name)
        except costs.UnknownPresetError:
            raise _not_found(f"no such cost preset: {preset_name}") from None
        return costs.compute(scenario).to_record()

    @app.post("/api/cost")
    def api_cost(scenario: dict):
        try:
            report = costs.compute(costs.CostScenario.from_record(scenario))
        except (KeyError, ValueError) as exc:
            raise _validation(f"bad scenario: {exc}") from None
        return report.to_record()

    @app.post("/api/export/retraining")
    def api_export(body: ExportBody):
        task = _task(body.task)
        since = None
        if body.from_:
            try:
                since = parse_instant(body.from_)
            except ValueError as exc:
                raise _validation(f"bad timestamp: {exc}") from None
        path, count = export_retraining(ctx.store, task, source=body.source, since=since)
        return {"path": str(path), "count": count}

    return app
