"""Uniform classification over interchangeable backends.

Two backends ship: a remote text-completion service (HTTP, bearer auth,
retries) and a deterministic offline stub driven by transparent keyword rule
tables, which is what keeps the whole test suite network-free. Results are
cached by (task, text hash, context hash, model version) so re-running a
completed batch never touches the backend again.
"""

from __future__ import annotations

import hashlib
import os
import string
import threading
import time
import uuid
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable, Iterable, Sequence

import httpx

from .ingest import estimate_tokens
from .labels import DEFAULT_LABEL, Task, argmax_label, labels_for
from .types import Abstain, AnnotatedExample, Classification, utcnow

RULES_DIR = Path(__file__).parent / "rules"
STRONG = 0.9
WEAK = 0.35
CONTEXT_STRENGTH = 0.8
BACKEND_TOKEN_ENV = "HYPERMOD_BACKEND_TOKEN"


class ParseFailure(ValueError):
    """The raw backend response did not resolve to exactly one known label."""


class TransportFailure(RuntimeError):
    pass


class BatchSuspended(RuntimeError):
    """The backend stayed unavailable past the configured window."""


def parse_label(raw: str, task: Task) -> str:
    """Case-insensitive exact match after trimming whitespace and punctuation."""
    cleaned = raw.strip().strip(string.punctuation + string.whitespace).casefold()
    for label in labels_for(task):
        if cleaned == label.casefold():
            return label
    raise ParseFailure(f"unparseable {task.value} response: {raw!r}")


@dataclass(frozen=True)
class PromptTemplate:
    """Prompt construction for one task; always enumerates the full label set."""

    task: Task
    instruction: str
    include_context: bool = False
    few_shot: tuple[AnnotatedExample, ...] = ()

    def __post_init__(self) -> None:
        for ex in self.few_shot:
            if ex.source != "human" or ex.split != "train":
                raise ValueError("few-shot examples must be human-annotated training examples")
            if ex.task is not self.task:
                raise ValueError("few-shot example task mismatch")

    def render(self, text: str, context: Sequence[str] = ()) -> str:
        parts = [self.instruction, "Labels: " + " | ".join(labels_for(self.task))]
        for ex in self.few_shot:
            parts.append(f"Message: {ex.text}\nLabel: {ex.gold_label}")
        if self.include_context and context:
            for i, prior in enumerate(context, start=1):
                parts.append(f"Context {i}: {prior}")
        parts.append(f"Message: {text}\nLabel:")
        return "\n\n".join(parts)


_INSTRUCTIONS = {
    Task.INTENT: "Classify the intent behind this community chat message.",
    Task.MODERATION: "Decide whether this community chat message is toxic, spam, or neither.",
    Task.CONTRIBUTION: (
        "Identify which kind of community contribution, if any, this message makes. "
        "Use the preceding messages for context."
    ),
    Task.SENTIMENT: "Classify the sentiment of this community chat message.",
}


def default_template(task: Task) -> PromptTemplate:
    return PromptTemplate(
        task=task,
        instruction=_INSTRUCTIONS[task],
        include_context=(task is Task.CONTRIBUTION),
    )


@dataclass(frozen=True)
class BackendResult:
    label: str
    scores: dict[str, float] | None
    raw: str


class StubBackend:
    """Deterministic keyword-rule classifier.

    Rule tables are line-delimited pattern<TAB>label files, one per task.
    Patterns are case-insensitive whole-word (or whole-phrase) matches; a
    leading "~" marks a weak indicator that raises the label's score to 0.35
    without flipping the message away from the task's default label. For the
    contribution task, when the message itself matches nothing, the context
    window is scanned as a fallback signal.
    """

    backend_id = "stub"
    model_version = "stub-1"
    returns_scores = True

    def __init__(self, rules_dir: str | Path = RULES_DIR):
        import re

        self._rules: dict[Task, list[tuple["re.Pattern[str]", str, float]]] = {}
        for task in Task:
            table = Path(rules_dir) / f"{task.value}.tsv"
            rules = []
            for line in table.read_text(encoding="utf-8").splitlines():
                line = line.strip()
                if not line:
                    continue
                pattern, label = line.split("\t")
                strength = STRONG
                if pattern.startswith("~"):
                    pattern, strength = pattern[1:], WEAK
                rx = re.compile(rf"\b{re.escape(pattern.casefold())}\b")
                rules.append((rx, label, strength))
            self._rules[task] = rules

    def _match(self, task: Task, text: str, strength_cap: float | None = None) -> dict[str, float]:
        found: dict[str, float] = {}
        lowered = text.casefold()
        for rx, label, strength in self._rules[task]:
            if rx.search(lowered):
                s = strength if strength_cap is None else min(strength, strength_cap)
                found[label] = max(found.get(label, 0.0), s)
        return found

    def classify(self, task: Task, text: str, context: Sequence[str] = ()) -> BackendResult:
        task = Task(task)
        matched = self._match(task, text)
        if not matched and task is Task.CONTRIBUTION and context:
            matched = self._match(task, " ".join(context), strength_cap=CONTEXT_STRENGTH)
        default = DEFAULT_LABEL[task]
        scores = {label: 0.0 for label in labels_for(task)}
        scores.update(matched)
        others = [s for label, s in scores.items() if label != default]
        scores[default] = max(scores[default], 1.0 - max(others, default=0.0))
        label = argmax_label(task, scores)
        return BackendResult(label=label, scores=scores, raw=label)


class RemoteBackend:
    """Text-completion HTTP backend: JSON {model, prompt, max_tokens}, bearer auth.

    Retries transient failures with exponential backoff (3 attempts starting
    at 1s) before giving up with a TransportFailure.
    """

    returns_scores = False

    def __init__(
        self,
        endpoint: str,
        model: str,
        max_tokens: int = 8,
        attempts: int = 3,
        backoff_start: float = 1.0,
        client: httpx.Client | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.backend_id = "remote"
        self.model_version = model
        self.endpoint = endpoint
        self.model = model
        self.max_tokens = max_tokens
        self.attempts = attempts
        self.backoff_start = backoff_start
        self._client = client or httpx.Client(timeout=30.0)
        self._sleep = sleep

    def _headers(self) -> dict[str, str]:
        token = os.environ.get(BACKEND_TOKEN_ENV, "")
        headers = {"Content-Type": "application/json"}
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, prompt: str) -> str:
        delay = self.backoff_start
        last: Exception | None = None
        for attempt in range(self.attempts):
            try:
                resp = self._client.post(
                    self.endpoint,
                    json={"model": self.model, "prompt": prompt, "max_tokens": self.max_tokens},
                    headers=self._headers(),
                )
                resp.raise_for_status()
                payload = resp.json()
                return payload["choices"][0]["text"]
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                last = exc
                if attempt + 1 < self.attempts:
                    self._sleep(delay)
                    delay *= 2
        raise TransportFailure(str(last))

    def classify(self, task: Task, text: str, context: Sequence[str] = ()) -> BackendResult:
        template = default_template(Task(task))
        raw = self.complete(template.render(text, context))
        label = parse_label(raw, Task(task))  # ParseFailure propagates to the gateway
        return BackendResult(label=label, scores=None, raw=raw)


class RateLimiter:
    """Sliding-window limiter: at most `rate` acquisitions in any 1s window."""

    def __init__(self, rate: float, clock: Callable[[], float] = time.monotonic):
        if rate <= 0:
            raise ValueError("rate must be > 0")
        self.rate = rate
        self._clock = clock
        self._calls: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                while self._calls and now - self._calls[0] >= 1.0:
                    self._calls.popleft()
                if len(self._calls) < self.rate:
                    self._calls.append(now)
                    return
                wait = 1.0 - (now - self._calls[0])
            time.sleep(max(wait, 0.001))


class ClassificationCache:
    """Thread-safe outcome cache keyed by (task, text hash, context hash, model version)."""

    def __init__(self) -> None:
        self._entries: dict[tuple[str, str, str, str], dict] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(task: Task, text: str, context: Sequence[str], model_version: str):
        text_hash = hashlib.sha256(text.encode("utf-8")).hexdigest()
        ctx_hash = hashlib.sha256("\x1f".join(context).encode("utf-8")).hexdigest()
        return (Task(task).value, text_hash, ctx_hash, model_version)

    def get(self, key) -> dict | None:
        with self._lock:
            entry = self._entries.get(key)
            if entry is None:
                self.misses += 1
            else:
                self.hits += 1
            return entry

    def put(self, key, entry: dict) -> None:
        with self._lock:
            self._entries[key] = entry

    def __len__(self) -> int:
        return len(self._entries)


@dataclass(frozen=True)
class BatchItem:
    message_id: str
    text: str
    context: tuple[str, ...] = ()
    author_id: str | None = None


@dataclass
class BatchRun:
    run_id: str
    task: Task
    backend_id: str
    message_count: int
    started_at: datetime
    finished_at: datetime | None = None
    outcomes: list[Classification | Abstain] = field(default_factory=list)
    token_usage: int = 0
    estimated_cost: float = 0.0
    backend_calls: int = 0
    cache_hits: int = 0
    completed: bool = True

    def label_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for out in self.outcomes:
            key = out.label if isinstance(out, Classification) else f"abstain:{out.reason}"
            counts[key] = counts.get(key, 0) + 1
        return counts

    def to_record(self) -> dict:
        return {
            "run_id": self.run_id,
            "task": self.task.value,
            "backend_id": self.backend_id,
            "message_count": self.message_count,
            "started_at": self.started_at.isoformat(),
            "finished_at": None if self.finished_at is None else self.finished_at.isoformat(),
            "token_usage": self.token_usage,
            "estimated_cost": self.estimated_cost,
            "backend_calls": self.backend_calls,
            "cache_hits": self.cache_hits,
            "completed": self.completed,
            "label_counts": self.label_counts(),
        }


class Gateway:
    """One backend plus its cache, rate limiter, and prompt templates."""

    def __init__(
        self,
        backend,
        cache: ClassificationCache | None = None,
        rate_limit: float | None = None,
        tokenizer: str = "chars_div_4",
        price_per_1k_tokens: float = 0.002,
        suspend_after_failures: int | None = None,
    ):
        self.backend = backend
        self.cache = cache or ClassificationCache()
        self.limiter = RateLimiter(rate_limit) if rate_limit else None
        self.tokenizer = tokenizer
        self.price_per_1k_tokens = price_per_1k_tokens
        self.suspend_after_failures = suspend_after_failures
        self.templates = {task: default_template(task) for task in Task}

    def _outcome_from_entry(
        self, entry: dict, task: Task, message_id: str, at: datetime
    ) -> Classification | Abstain:
        if "abstain" in entry:
            return Abstain(
                message_id=message_id,
                task=task,
                reason=entry["abstain"],
                raw=entry.get("raw", ""),
                backend_id=self.backend.backend_id,
                model_version=self.backend.model_version,
                created_at=at,
            )
        return Classification(
            message_id=message_id,
            task=task,
            label=entry["label"],
            scores=entry.get("scores"),
            backend_id=self.backend.backend_id,
            model_version=self.backend.model_version,
            created_at=at,
        )

    def classify(
        self,
        task: Task,
        text: str,
        context: Sequence[str] = (),
        message_id: str = "",
        at: datetime | None = None,
    ) -> Classification | Abstain:
        """Classify one text, via cache when possible. Abstains carry the raw response."""
        if not text:
            raise ValueError("text must be non-empty")
        task = Task(task)
        at = at or utcnow()
        key = ClassificationCache.key(task, text, context, self.backend.model_version)
        entry = self.cache.get(key)
        if entry is None:
            entry = self._call_backend(task, text, context)
            if entry.get("abstain") != "transport":
                self.cache.put(key, entry)
        return self._outcome_from_entry(entry, task, message_id, at)

    def _call_backend(self, task: Task, text: str, context: Sequence[str]) -> dict:
        if self.limiter is not None:
            self.limiter.acquire()
        try:
            result = self.backend.classify(task, text, context)
        except TransportFailure as exc:
            return {"abstain": "transport", "raw": str(exc)}
        except ParseFailure as exc:
            return {"abstain": "parse", "raw": str(exc)}
        return {"label": result.label, "scores": result.scores, "raw": result.raw}

    def prompt_tokens(self, task: Task, text: str, context: Sequence[str]) -> int:
        rendered = self.templates[Task(task)].render(text, context)
        return estimate_tokens(rendered, self.tokenizer)

    def run_batch(
        self,
        task: Task,
        items: Iterable[BatchItem],
        parallelism: int = 1,
        at: datetime | None = None,
    ) -> BatchRun:
        """Classify a stream with bounded parallelism.

        Cache hits make no backend call and cost no tokens, so re-running a
        completed batch is free. After `suspend_after_failures` consecutive
        transport abstains the run suspends (completed=False); a rerun picks
        up from the cache.
        """
        if parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        task = Task(task)
        items = list(items)
        run = BatchRun(
            run_id=uuid.uuid4().hex,
            task=task,
            backend_id=self.backend.backend_id,
            message_count=len(items),
            started_at=at or utcnow(),
        )
        consecutive_failures = 0
        stop = threading.Event()
        lock = threading.Lock()

        def work(item: BatchItem) -> Classification | Abstain | None:
            nonlocal consecutive_failures
            if stop.is_set():
                return None
            key = ClassificationCache.key(task, item.text, item.context, self.backend.model_version)
            entry = self.cache.get(key)
            fresh = entry is None
            if fresh:
                entry = self._call_backend(task, item.text, item.context)
                # transport failures are transient; caching them would poison reruns
                if entry.get("abstain") != "transport":
                    self.cache.put(key, entry)
            outcome = self._outcome_from_entry(entry, task, item.message_id, run.started_at)
            with lock:
                if fresh:
                    run.backend_calls += 1
                    run.token_usage += self.prompt_tokens(task, item.text, item.context)
                else:
                    run.cache_hits += 1
                if fresh and isinstance(outcome, Abstain) and outcome.reason == "transport":
                    consecutive_failures += 1
                    if (
                        self.suspend_after_failures is not None
                        and consecutive_failures >= self.suspend_after_failures
                    ):
                        stop.set()
                elif fresh:
                    consecutive_failures = 0
            return outcome

        if parallelism == 1:
            results = [work(item) for item in items]
        else:
            with ThreadPoolExecutor(max_workers=parallelism) as pool:
                results = list(pool.map(work, items))

        run.outcomes = [r for r in results if r is not None]
        run.completed = len(run.outcomes) == len(items)
        run.estimated_cost = run.token_usage * self.price_per_1k_tokens / 1000.0
        run.finished_at = utcnow()
        return run
