"""Provider-agnostic chat-completion client.

One built-in codec speaks the dominant hosted chat API shape (POST
``/v1/chat/completions`` with a bearer token), so any compatible endpoint
works. ``mode="mock"`` swaps the transport for a deterministic local template
bank so the whole application runs offline.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from typing import Any, Mapping

import httpx

from .errors import PlannerError

CHAT_COMPLETIONS_PATH = "/v1/chat/completions"

ENV_URL = "APP_PLANNER_LLM_URL"
ENV_KEY = "APP_PLANNER_LLM_KEY"
ENV_MODEL = "APP_PLANNER_LLM_MODEL"
ENV_TIMEOUT_MS = "APP_PLANNER_LLM_TIMEOUT_MS"
ENV_MODE = "APP_PLANNER_LLM_MODE"

_FINISH_REASONS = {"stop": "stop", "length": "length",
                   "filtered": "filtered", "content_filter": "filtered"}


class InvalidRequest(PlannerError):
    pass


class ProviderTimeout(PlannerError):
    pass


class ProviderRejected(PlannerError):
    """Endpoint refused the call. ``detail['status']`` is the last HTTP status."""


class MalformedReply(PlannerError):
    """Reply body undecodable. ``detail['path']`` points at the offending field."""


@dataclass(frozen=True)
class ModelMessage:
    role: str  # system | user | assistant
    content: str


@dataclass(frozen=True)
class ModelRequest:
    model: str
    messages: tuple[ModelMessage, ...]
    temperature: float = 0.7
    max_tokens: int = 512

    def validate(self) -> None:
        if not self.messages:
            raise InvalidRequest("request needs at least a system message")
        if self.messages[0].role != "system":
            raise InvalidRequest("first message must have role=system")
        previous = "system"
        for i, msg in enumerate(self.messages[1:], start=1):
            if msg.role not in ("user", "assistant"):
                raise InvalidRequest(f"message {i} has invalid role '{msg.role}'")
            if previous == "system" and msg.role != "user":
                raise InvalidRequest("the first turn after the system message must be user")
            if msg.role == previous:
                raise InvalidRequest(f"consecutive {msg.role} turns at message {i}")
            previous = msg.role
        if not (0.0 <= self.temperature <= 2.0):
            raise InvalidRequest("temperature must be within [0.0, 2.0]")
        if self.max_tokens <= 0:
            raise InvalidRequest("max_tokens must be positive")


@dataclass(frozen=True)
class ModelReply:
    content: str
    finish_reason: str  # stop | length | filtered
    prompt_tokens: int
    completion_tokens: int


@dataclass(frozen=True)
class ProviderConfig:
    base_url: str = "https://api.openai.com"
    api_key: str = field(default="", repr=False)  # never logged or serialized
    model: str = "gpt-4o-mini"
    timeout_ms: int = 20_000
    max_retries: int = 2
    backoff_base_ms: int = 500
    mode: str = "mock"  # live | mock
    mock_seed: int = 0

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None) -> "ProviderConfig":
        env = os.environ if environ is None else environ
        defaults = cls()
        return cls(
            base_url=env.get(ENV_URL, defaults.base_url),
            api_key=env.get(ENV_KEY, ""),
            model=env.get(ENV_MODEL, defaults.model),
            timeout_ms=int(env.get(ENV_TIMEOUT_MS, defaults.timeout_ms)),
            mode=env.get(ENV_MODE, defaults.mode),
        )


def encode_request(request: ModelRequest) -> bytes:
    """Canonical UTF-8 body: fixed key order, compact separators, minimal escaping.

    Byte-stable for a fixed request, so golden-file tests pin the wire format.
    """
    request.validate()
    body = {
        "model": request.model,
        "messages": [{"role": m.role, "content": m.content} for m in request.messages],
        "temperature": request.temperature,
        "max_tokens": request.max_tokens,
    }
    return json.dumps(body, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def _pluck(node: Any, path: str, leaf: str, expect: type) -> Any:
    full = f"{path}.{leaf}" if path else leaf
    if not isinstance(node, dict) or leaf not in node:
        raise MalformedReply(f"reply is missing required field '{full}'", path=full)
    value = node[leaf]
    # bool is an int subclass; a true/false token count is still malformed.
    if not isinstance(value, expect) or (expect is int and isinstance(value, bool)):
        raise MalformedReply(f"reply field '{full}' has the wrong type", path=full)
    return value


def decode_reply(data: bytes) -> ModelReply:
    """Decode a reply body, ignoring unknown keys at every level."""
    try:
        body = json.loads(data)
    except (ValueError, UnicodeDecodeError):
        raise MalformedReply("reply body is not valid JSON", path="$") from None
    choices = _pluck(body, "", "choices", list)
    if not choices:
        raise MalformedReply("reply has an empty 'choices' list", path="choices")
    choice = choices[0]
    message = _pluck(choice, "choices[0]", "message", dict)
    content = _pluck(message, "choices[0].message", "content", str)
    raw_reason = _pluck(choice, "choices[0]", "finish_reason", str)
    finish_reason = _FINISH_REASONS.get(raw_reason)
    if finish_reason is None:
        raise MalformedReply(
            f"unknown finish_reason '{raw_reason}'", path="choices[0].finish_reason"
        )
    if finish_reason == "stop" and not content:
        raise MalformedReply(
            "content must be non-empty when finish_reason is stop",
            path="choices[0].message.content",
        )
    usage = _pluck(body, "", "usage", dict)
    return ModelReply(
        content=content,
        finish_reason=finish_reason,
        prompt_tokens=_pluck(usage, "usage", "prompt_tokens", int),
        completion_tokens=_pluck(usage, "usage", "completion_tokens", int),
    )


# Scaffolding-style canned replies for offline mode. Selection is a stable
# hash of (seed, message contents); {echo} carries the student's own words.
_MOCK_REPLIES: tuple[str, ...] = (
    'Great start. You said "{echo}" — who would use this the most, and in what moment of their day?',
    'That is an interesting direction. Thinking about "{echo}", what problem does it solve? Try naming one specific situation.',
    'One way to build on "{echo}" is to picture the first screen your user sees. What would they tap first?',
    'You mentioned "{echo}". A similar app might use a list view to organize choices and a button to confirm. Which pieces fit your idea?',
    'Let\'s dig into "{echo}". Who is affected, when does it happen, and where? Answering those three makes a plan much stronger.',
    'Building on "{echo}": imagine your user opens the app for ten seconds. What is the one thing they must get done?',
    'Good question about "{echo}". For example, a reminder feature could use a notification and a calendar. What would yours remind people about?',
    'About "{echo}" — consider both sides: what is the best thing that could happen, and what could go wrong, like privacy or screen time?',
    'You are exploring "{echo}". Try one sentence that names the user, the need, and the place it happens.',
    'I love where "{echo}" is heading. Sketch two features: one that shows information and one that lets the user act on it.',
    'Thinking about "{echo}": what information does the app need from the user, and how would they enter it — a text box, a menu, a camera?',
    'That connects to your goal. From "{echo}", pick the single most important feature and describe what happens when someone uses it.',
)


def mock_complete(request: ModelRequest, seed: int) -> ModelReply:
    """Deterministic offline stand-in for ``complete``. No network, ever."""
    last_user = next((m.content for m in reversed(request.messages) if m.role == "user"), "")
    echo = " ".join(last_user.split()[:6]) or "your idea"
    digest = hashlib.sha256(str(seed).encode("utf-8"))
    for msg in request.messages:
        digest.update(b"\x00")
        digest.update(msg.content.encode("utf-8"))
    index = int.from_bytes(digest.digest()[:8], "big") % len(_MOCK_REPLIES)
    content = _MOCK_REPLIES[index].replace("{echo}", echo)
    prompt_chars = sum(len(m.content) for m in request.messages)
    return ModelReply(
        content=content,
        finish_reason="stop",
        prompt_tokens=max(1, prompt_chars // 4),
        completion_tokens=max(1, len(content) // 4),
    )


def complete(request: ModelRequest, config: ProviderConfig) -> ModelReply:
    """One chat completion. Mock mode never touches the network.

    Live mode makes at most ``1 + max_retries`` attempts, retrying only on
    timeouts, 5xx, and 429 with exponential backoff. Other 4xx statuses fail
    immediately as ProviderRejected; exhausted retries surface the last fault.
    """
    request.validate()
    if config.mode == "mock":
        return mock_complete(request, config.mock_seed)
    if not config.api_key:
        raise InvalidRequest("live mode requires an API key")
    url = config.base_url.rstrip("/") + CHAT_COMPLETIONS_PATH
    body = encode_request(request)
    headers = {
        "Authorization": f"Bearer {config.api_key}",
        "Content-Type": "application/json",
    }
    timeout = config.timeout_ms / 1000.0
    attempts = 1 + max(0, config.max_retries)
    last_status: int | None = None
    timed_out = False
    for attempt in range(attempts):
        if attempt:
            time.sleep(config.backoff_base_ms / 1000.0 * (2 ** (attempt - 1)))
        try:
            response = httpx.post(url, content=body, headers=headers, timeout=timeout)
        except httpx.TimeoutException:
            timed_out = True
            last_status = None
            continue
        except httpx.HTTPError as exc:
            raise ProviderRejected(f"transport failure: {exc.__class__.__name__}", status=0) from exc
        if response.status_code == 200:
            return decode_reply(response.content)
        last_status = response.status_code
        timed_out = False
        if response.status_code >= 500 or response.status_code == 429:
            continue
        raise ProviderRejected(
            f"provider rejected the request with status {response.status_code}",
            status=response.status_code,
        )
    if timed_out:
        raise ProviderTimeout(f"provider timed out after {attempts} attempts")
    raise ProviderRejected(
        f"provider still failing with status {last_status} after {attempts} attempts",
        status=last_status,
    )
