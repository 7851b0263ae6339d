"""Counterbalanced condition assignment and event-log interaction metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import PlannerError
from .plan import SectionKind
from .store import EventKind, StoredEnvelope

CONDITION_AIDED = "aided"
CONDITION_UNAIDED = "unaided"


class TaskCountNot2(PlannerError):
    pass


class NoParticipants(PlannerError):
    pass


@dataclass(frozen=True)
class TaskCondition:
    task_id: str
    condition: str  # aided | unaided


@dataclass(frozen=True)
class Assignment:
    participant_id: str
    tasks: tuple[TaskCondition, ...]


@dataclass(frozen=True)
class InteractionMetrics:
    project_id: str
    chat_turns: int
    preset_clicks: int
    freeform_queries: int
    per_section_edit_counts: dict[str, int]
    per_section_chat_counts: dict[str, int]
    duration_ms: int


def assign_conditions(
    participant_ids: Sequence[str], task_ids: Sequence[str]
) -> list[Assignment]:
    """Within-subjects split: everyone does both tasks, exactly one of them aided.

    Deterministic given input order: the first ceil(n/2) participants work the
    first task unaided and the second aided; the rest get the flip. Task order
    itself is fixed — only the condition alternates.
    """
    if len(task_ids) != 2:
        raise TaskCountNot2(f"exactly 2 tasks required, got {len(task_ids)}")
    if not participant_ids:
        raise NoParticipants("at least one participant required")
    first_task, second_task = task_ids
    unaided_first_count = (len(participant_ids) + 1) // 2
    assignments = []
    for position, participant in enumerate(participant_ids):
        if position < unaided_first_count:
            tasks = (
                TaskCondition(first_task, CONDITION_UNAIDED),
                TaskCondition(second_task, CONDITION_AIDED),
            )
        else:
            tasks = (
                TaskCondition(first_task, CONDITION_AIDED),
                TaskCondition(second_task, CONDITION_UNAIDED),
            )
        assignments.append(Assignment(participant_id=participant, tasks=tasks))
    return assignments


def compute_metrics(envelope: StoredEnvelope) -> InteractionMetrics:
    """Interaction counts derived from the event log alone; safe to recompute."""
    chat_turns = 0
    preset_clicks = 0
    freeform_queries = 0
    edits = {kind.value: 0 for kind in SectionKind if kind != SectionKind.TITLE}
    chats = {kind.value: 0 for kind in SectionKind if kind != SectionKind.TITLE}
    created_ts: int | None = None
    last_ts = 0
    for event in envelope.events:
        last_ts = max(last_ts, event.ts)
        if event.kind == EventKind.PROJECT_CREATED and created_ts is None:
            created_ts = event.ts
        elif event.kind == EventKind.SECTION_UPDATED:
            section = str(event.payload.get("section", ""))
            if section in edits:
                edits[section] += 1
        elif event.kind == EventKind.CHAT_TURN:
            chat_turns += 1
            if event.payload.get("input_kind") == "preset":
                preset_clicks += 1
            else:
                freeform_queries += 1
            section = str(event.payload.get("section", ""))
            if section in chats:
                chats[section] += 1
    duration = (last_ts - created_ts) if created_ts is not None else 0
    return InteractionMetrics(
        project_id=envelope.project.id,
        chat_turns=chat_turns,
        preset_clicks=preset_clicks,
        freeform_queries=freeform_queries,
        per_section_edit_counts=edits,
        per_section_chat_counts=chats,
        duration_ms=duration,
    )
