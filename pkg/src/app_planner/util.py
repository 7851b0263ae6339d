"""Clocks and id factories, injectable so replayed sessions are byte-reproducible."""

from __future__ import annotations

import time
import uuid
from typing import Protocol


class Clock(Protocol):
    def now_ms(self) -> int: ...


class SystemClock:
    """Wall clock in UTC milliseconds since the epoch."""

    def now_ms(self) -> int:
        return int(time.time() * 1000)


class TickClock:
    """Deterministic clock: starts at a fixed epoch, advances a fixed step per call."""

    def __init__(self, start_ms: int = 1_700_000_000_000, step_ms: int = 1) -> None:
        self._next = start_ms
        self._step = step_ms

    def now_ms(self) -> int:
        now = self._next
        self._next += self._step
        return now


def random_id() -> str:
    return uuid.uuid4().hex


class SequentialIds:
    """Deterministic id factory for replays and fixtures."""

    def __init__(self, prefix: str = "p") -> None:
        self._prefix = prefix
        self._count = 0

    def __call__(self) -> str:
        self._count += 1
        return f"{self._prefix}{self._count:04d}"
