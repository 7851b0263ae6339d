"""High-level session operations shared by the HTTP service, the CLI, and replays.

Every mutating operation follows the same discipline: take the per-project
lock, load the envelope, apply the pure domain operation, append the matching
event, save, and only then return. A caller that got a result can rely on the
state being durable.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable

from . import brief as brief_mod
from . import chat as chat_mod
from . import provider as llm
from . import rubric as rubric_mod
from .plan import CHAT_SECTIONS, Project, SectionKind, new_project, update_section
from .scaffold import Catalog, default_catalog
from .store import (
    Event,
    EventKind,
    ProjectStore,
    StoredEnvelope,
    append_event,
    append_messages,
    envelope_for,
    message_count,
    with_project,
)
from .util import Clock, SystemClock, random_id

PROVIDER_INFLIGHT_CAP = 4


@dataclass
class AppContext:
    store: ProjectStore
    catalog: Catalog = field(default_factory=default_catalog)
    provider: llm.ProviderConfig = field(default_factory=llm.ProviderConfig)
    clock: Clock = field(default_factory=SystemClock)
    id_factory: Callable[[], str] = random_id
    history_window: int = chat_mod.HISTORY_WINDOW_DEFAULT
    complete_fn: Callable[[llm.ModelRequest, llm.ProviderConfig], llm.ModelReply] = llm.complete
    _locks: dict[str, threading.Lock] = field(default_factory=dict)
    _locks_guard: threading.Lock = field(default_factory=threading.Lock)
    _provider_gate: threading.Semaphore = field(
        default_factory=lambda: threading.Semaphore(PROVIDER_INFLIGHT_CAP)
    )

    def lock_for(self, project_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(project_id, threading.Lock())

    def gated_complete(
        self, request: llm.ModelRequest, config: llm.ProviderConfig
    ) -> llm.ModelReply:
        with self._provider_gate:
            return self.complete_fn(request, config)


def create_project(ctx: AppContext, title: str) -> StoredEnvelope:
    project = new_project(title, project_id=ctx.id_factory(), now_ms=ctx.clock.now_ms())
    envelope = envelope_for(project)
    envelope = append_event(
        envelope,
        Event(ts=project.created_at, kind=EventKind.PROJECT_CREATED, payload={"title": project.title}),
    )
    with ctx.lock_for(project.id):
        ctx.store.save(envelope)
    return envelope


def edit_section(
    ctx: AppContext, project_id: str, kind: SectionKind, text: str
) -> StoredEnvelope:
    with ctx.lock_for(project_id):
        envelope = ctx.store.load(project_id)
        project = update_section(envelope.project, kind, text, now_ms=ctx.clock.now_ms())
        envelope = with_project(envelope, project)
        envelope = append_event(
            envelope,
            Event(
                ts=project.updated_at,
                kind=EventKind.SECTION_UPDATED,
                payload={"section": kind.value, "revision": project.sections[kind].revision},
            ),
        )
        ctx.store.save(envelope)
    return envelope


def chat_turn(
    ctx: AppContext, project_id: str, kind: SectionKind, chat_input: chat_mod.ChatInput
) -> tuple[StoredEnvelope, chat_mod.ChatTurn]:
    """One chat turn, persisted before this returns — including the system reply
    a blocked or provider-down turn produces (the exception is re-raised after
    the save so HTTP callers can map it)."""
    with ctx.lock_for(project_id):
        envelope = ctx.store.load(project_id)
        history = envelope.transcripts.get(kind, [])
        error: chat_mod.ModerationBlocked | chat_mod.ProviderUnavailable | None = None
        try:
            turn = chat_mod.handle_message(
                envelope.project,
                kind,
                chat_input,
                history,
                catalog=ctx.catalog,
                provider_config=ctx.provider,
                next_seq=message_count(envelope),
                now_fn=ctx.clock.now_ms,
                history_window=ctx.history_window,
                complete_fn=ctx.gated_complete,
            )
        except (chat_mod.ModerationBlocked, chat_mod.ProviderUnavailable) as exc:
            error = exc
            turn = exc.turn
        envelope = append_messages(envelope, turn.student_echo, turn.planner_reply)
        payload: dict[str, object] = {
            "section": kind.value,
            "input_kind": "preset" if isinstance(chat_input, chat_mod.PresetClick) else "freeform",
            "outcome": turn.outcome,
        }
        if isinstance(chat_input, chat_mod.PresetClick):
            payload["preset_id"] = chat_input.question_id
        envelope = append_event(
            envelope,
            Event(ts=turn.planner_reply.created_at, kind=EventKind.CHAT_TURN, payload=payload),
        )
        ctx.store.save(envelope)
        if error is not None:
            raise error
    return envelope, turn


def evaluate(
    ctx: AppContext,
    project_id: str,
    kind: SectionKind | None = None,
    mode: str = rubric_mod.MODE_HEURISTIC,
) -> tuple[StoredEnvelope, list[rubric_mod.RubricResult]]:
    with ctx.lock_for(project_id):
        envelope = ctx.store.load(project_id)
        kinds = [kind] if kind is not None else list(CHAT_SECTIONS)
        results = []
        for section in kinds:
            result = rubric_mod.evaluate_section(
                envelope.project,
                section,
                mode,
                catalog=ctx.catalog,
                provider_config=ctx.provider,
                complete_fn=ctx.gated_complete,
                now_ms=ctx.clock.now_ms(),
            )
            results.append(result)
            envelope = append_event(
                envelope,
                Event(
                    ts=result.generated_at,
                    kind=EventKind.RUBRIC_RUN,
                    payload={
                        "section": section.value,
                        "mode": result.mode,
                        "ready": result.section_ready,
                    },
                ),
            )
        ctx.store.save(envelope)
    return envelope, results


def readiness(ctx: AppContext, project: Project) -> rubric_mod.Readiness:
    return rubric_mod.project_readiness(project, catalog=ctx.catalog)


def read_brief(ctx: AppContext, project_id: str) -> tuple[brief_mod.AppBrief, str]:
    """Read-only brief view; logs nothing (GET semantics)."""
    envelope = ctx.store.load(project_id)
    built = brief_mod.build_brief(envelope.project, catalog=ctx.catalog)
    return built, brief_mod.render_instruction(built)


def export_brief(ctx: AppContext, project_id: str) -> tuple[brief_mod.AppBrief, str]:
    """Exporting is an action: builds the brief and records a BriefExported event."""
    with ctx.lock_for(project_id):
        envelope = ctx.store.load(project_id)
        built = brief_mod.build_brief(envelope.project, catalog=ctx.catalog)
        instruction = brief_mod.render_instruction(built)
        envelope = append_event(
            envelope,
            Event(
                ts=ctx.clock.now_ms(),
                kind=EventKind.BRIEF_EXPORTED,
                payload={"features": len(built.features)},
            ),
        )
        ctx.store.save(envelope)
    return built, instruction


def transcript(
    ctx: AppContext, project_id: str, kind: SectionKind | None = None
) -> list[chat_mod.ChatMessage]:
    envelope = ctx.store.load(project_id)
    if kind is not None:
        return list(envelope.transcripts.get(kind, []))
    merged: list[chat_mod.ChatMessage] = []
    for section in CHAT_SECTIONS:
        merged.extend(envelope.transcripts.get(section, []))
    merged.sort(key=lambda m: (m.created_at, m.id))
    return merged
