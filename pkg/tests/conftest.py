"""Shared fixtures: contexts with deterministic clocks, a counting mock, and a
scripted fault server for exercising the live transport offline."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from app_planner import demo, session
from app_planner.provider import ModelRequest, ProviderConfig, mock_complete
from app_planner.scaffold import Catalog, default_catalog
from app_planner.store import ProjectStore
from app_planner.util import SequentialIds, TickClock

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def catalog() -> Catalog:
    return default_catalog()


@dataclass
class CountingProvider:
    """complete_fn stand-in that counts calls and otherwise behaves like the mock."""

    calls: int = 0
    requests: list[ModelRequest] = field(default_factory=list)

    def __call__(self, request: ModelRequest, config: ProviderConfig):
        self.calls += 1
        self.requests.append(request)
        return mock_complete(request, config.mock_seed)


@pytest.fixture
def counting_provider() -> CountingProvider:
    return CountingProvider()


def make_ctx(store_dir, *, complete_fn=None, mock_seed: int = 0) -> session.AppContext:
    ctx = session.AppContext(
        store=ProjectStore(store_dir),
        catalog=default_catalog(),
        provider=ProviderConfig(mode="mock", mock_seed=mock_seed),
        clock=TickClock(),
        id_factory=SequentialIds(),
    )
    if complete_fn is not None:
        ctx.complete_fn = complete_fn
    return ctx


@pytest.fixture
def ctx(tmp_path) -> session.AppContext:
    return make_ctx(tmp_path / "store")


@pytest.fixture
def demo_envelopes(ctx):
    return demo.seed_demo(ctx)


@pytest.fixture
def lunch_project(demo_envelopes):
    return demo_envelopes[0].project


@pytest.fixture
def translator_project(demo_envelopes):
    return demo_envelopes[1].project


class _ScriptedHandler(BaseHTTPRequestHandler):
    def do_POST(self):  # noqa: N802 - http.server API
        server = self.server
        server.requests.append(self.path)
        length = int(self.headers.get("Content-Length", 0))
        server.bodies.append(self.rfile.read(length))
        server.auth_headers.append(self.headers.get("Authorization", ""))
        step = server.script[min(len(server.requests) - 1, len(server.script) - 1)]
        if isinstance(step, int):
            self.send_response(step)
            self.send_header("Content-Length", "0")
            self.end_headers()
            return
        body = json.dumps(step).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):  # silence test output
        pass


def ok_reply(content: str = "Great idea! What would the first screen show?") -> dict:
    return {
        "choices": [{"message": {"content": content}, "finish_reason": "stop"}],
        "usage": {"prompt_tokens": 10, "completion_tokens": 8},
    }


class FaultServer:
    """Local HTTP server that answers requests by a fixed script.

    Script entries: an int (that status with no body) or a dict (200 + JSON).
    The last entry repeats if more requests arrive.
    """

    def __init__(self, script):
        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), _ScriptedHandler)
        self._httpd.script = script
        self._httpd.requests = []
        self._httpd.bodies = []
        self._httpd.auth_headers = []
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    def __enter__(self) -> "FaultServer":
        self._thread.start()
        return self

    def __exit__(self, *exc) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address
        return f"http://{host}:{port}"

    @property
    def request_count(self) -> int:
        return len(self._httpd.requests)

    @property
    def paths(self) -> list[str]:
        return list(self._httpd.requests)

    @property
    def auth_headers(self) -> list[str]:
        return list(self._httpd.auth_headers)

    @property
    def bodies(self) -> list[bytes]:
        return list(self._httpd.bodies)


def live_config(url: str, **overrides) -> ProviderConfig:
    defaults = dict(
        base_url=url,
        api_key="test-key-secret",
        model="gpt-test",
        timeout_ms=2_000,
        max_retries=2,
        backoff_base_ms=1,
        mode="live",
    )
    defaults.update(overrides)
    return ProviderConfig(**defaults)
