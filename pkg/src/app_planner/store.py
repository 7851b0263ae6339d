"""Durable persistence: one canonical file per project plus an index.

Layout is deliberately plain for classroom scale: ``<project_id>.plan`` files
and an ``index.plan`` under one directory. Writes are atomic (temp file,
fsync, rename), serialization is canonical (sorted keys, fixed separators), so
identical envelopes produce identical bytes and a reader never observes a
half-written file. The service enforces a single writer per project id.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Any

from .chat import ChatMessage
from .errors import PlannerError
from .plan import CHAT_SECTIONS, Project, SectionContent, SectionKind, STAGE_COMPLETE

SCHEMA_VERSION = 1

ENV_STORE_DIR = "APP_PLANNER_STORE_DIR"
INDEX_FILE = "index.plan"


class NotFound(PlannerError):
    pass


class CorruptEnvelope(PlannerError):
    pass


class StorageFull(PlannerError):
    pass


class SerializationFailure(PlannerError):
    pass


class EventKind(str, Enum):
    PROJECT_CREATED = "ProjectCreated"
    SECTION_UPDATED = "SectionUpdated"
    CHAT_TURN = "ChatTurn"
    RUBRIC_RUN = "RubricRun"
    BRIEF_EXPORTED = "BriefExported"
    CONDITION_ASSIGNED = "ConditionAssigned"


@dataclass(frozen=True)
class Event:
    ts: int
    kind: EventKind
    payload: dict[str, Any]


@dataclass(frozen=True)
class StoredEnvelope:
    schema_version: int
    project: Project
    transcripts: dict[SectionKind, list[ChatMessage]]
    events: list[Event]


@dataclass(frozen=True)
class ProjectSummary:
    id: str
    title: str
    updated_at: int


def envelope_for(project: Project) -> StoredEnvelope:
    return StoredEnvelope(
        schema_version=SCHEMA_VERSION,
        project=project,
        transcripts={kind: [] for kind in CHAT_SECTIONS},
        events=[],
    )


def message_count(envelope: StoredEnvelope) -> int:
    return sum(len(thread) for thread in envelope.transcripts.values())


# --- wire/disk dict forms (also reused by the HTTP layer) --------------------

def project_to_dict(project: Project) -> dict[str, Any]:
    cursor = project.stage_cursor
    return {
        "id": project.id,
        "title": project.title,
        "sections": {
            kind.value: {
                "text": content.text,
                "last_edited_at": content.last_edited_at,
                "revision": content.revision,
            }
            for kind, content in project.sections.items()
        },
        "stage_cursor": cursor.value if isinstance(cursor, SectionKind) else cursor,
        "created_at": project.created_at,
        "updated_at": project.updated_at,
        "schema_version": project.schema_version,
    }


def message_to_dict(message: ChatMessage) -> dict[str, Any]:
    return {
        "id": message.id,
        "project_id": message.project_id,
        "section": message.section.value,
        "role": message.role,
        "origin": message.origin,
        "text": message.text,
        "created_at": message.created_at,
    }


def event_to_dict(event: Event) -> dict[str, Any]:
    return {"ts": event.ts, "kind": event.kind.value, "payload": event.payload}


def envelope_to_dict(envelope: StoredEnvelope) -> dict[str, Any]:
    return {
        "schema_version": envelope.schema_version,
        "project": project_to_dict(envelope.project),
        "transcripts": {
            kind.value: [message_to_dict(m) for m in thread]
            for kind, thread in envelope.transcripts.items()
        },
        "events": [event_to_dict(e) for e in envelope.events],
    }


def _project_from_dict(data: dict[str, Any]) -> Project:
    sections: dict[SectionKind, SectionContent] = {}
    for key, raw in data["sections"].items():
        sections[SectionKind(key)] = SectionContent(
            text=raw["text"],
            last_edited_at=int(raw["last_edited_at"]),
            revision=int(raw["revision"]),
        )
    for kind in CHAT_SECTIONS:
        if kind not in sections:
            raise KeyError(f"missing section '{kind.value}'")
    raw_cursor = data["stage_cursor"]
    cursor = raw_cursor if raw_cursor == STAGE_COMPLETE else SectionKind(raw_cursor)
    return Project(
        id=data["id"],
        title=data["title"],
        sections=sections,
        stage_cursor=cursor,
        created_at=int(data["created_at"]),
        updated_at=int(data["updated_at"]),
        schema_version=int(data["schema_version"]),
    )


def _message_from_dict(data: dict[str, Any]) -> ChatMessage:
    return ChatMessage(
        id=data["id"],
        project_id=data["project_id"],
        section=SectionKind(data["section"]),
        role=data["role"],
        origin=data["origin"],
        text=data["text"],
        created_at=int(data["created_at"]),
    )


def serialize_envelope(envelope: StoredEnvelope) -> bytes:
    """Canonical bytes: sorted keys, compact separators, UTF-8, one trailing LF."""
    try:
        text = json.dumps(
            envelope_to_dict(envelope), sort_keys=True, separators=(",", ":"), ensure_ascii=False
        )
    except (TypeError, ValueError) as exc:
        raise SerializationFailure(f"envelope not serializable: {exc}") from exc
    return text.encode("utf-8") + b"\n"


def deserialize_envelope(data: bytes) -> StoredEnvelope:
    try:
        doc = json.loads(data)
        version = int(doc["schema_version"])
        if version > SCHEMA_VERSION:
            raise CorruptEnvelope(f"unsupported schema_version {version}")
        doc = _migrate(doc, version)
        transcripts = {
            SectionKind(key): [_message_from_dict(m) for m in thread]
            for key, thread in doc["transcripts"].items()
        }
        if any(kind == SectionKind.TITLE for kind in transcripts):
            raise CorruptEnvelope("title section cannot carry a transcript")
        events = [
            Event(ts=int(e["ts"]), kind=EventKind(e["kind"]), payload=dict(e["payload"]))
            for e in doc["events"]
        ]
        for earlier, later in zip(events, events[1:]):
            if later.ts < earlier.ts:
                raise CorruptEnvelope("event log is not ordered by timestamp")
        return StoredEnvelope(
            schema_version=SCHEMA_VERSION,
            project=_project_from_dict(doc["project"]),
            transcripts=transcripts,
            events=events,
        )
    except CorruptEnvelope:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptEnvelope(f"envelope undecodable: {exc}") from exc


def _migrate(doc: dict[str, Any], version: int) -> dict[str, Any]:
    # Identity migration: version 1 is current. Future versions chain here.
    return doc


def _write_file_sync(path: Path, data: bytes) -> None:
    with open(path, "wb") as handle:
        handle.write(data)
        handle.flush()
        os.fsync(handle.fileno())


def _fsync_dir(path: Path) -> None:
    fd = os.open(path, os.O_RDONLY)
    try:
        os.fsync(fd)
    finally:
        os.close(fd)


class ProjectStore:
    """File-backed store. Reads always see a complete previous version."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, project_id: str) -> Path:
        if not project_id or "/" in project_id or project_id.startswith("."):
            raise NotFound(f"no project with id '{project_id}'", project_id=project_id)
        return self.root / f"{project_id}.plan"

    def _atomic_write(self, path: Path, data: bytes) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        try:
            _write_file_sync(tmp, data)
            os.replace(tmp, path)
            _fsync_dir(self.root)
        except OSError as exc:
            if exc.errno == 28:  # ENOSPC
                raise StorageFull("store directory is out of space") from exc
            raise

    def save(self, envelope: StoredEnvelope) -> None:
        data = serialize_envelope(envelope)
        self._atomic_write(self._path(envelope.project.id), data)
        self._update_index(envelope.project)

    def load(self, project_id: str) -> StoredEnvelope:
        path = self._path(project_id)
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            raise NotFound(f"no project with id '{project_id}'", project_id=project_id) from None
        return deserialize_envelope(data)

    def exists(self, project_id: str) -> bool:
        try:
            return self._path(project_id).exists()
        except NotFound:
            return False

    def append_event(self, project_id: str, event: Event) -> None:
        envelope = self.load(project_id)
        self.save(append_event(envelope, event))

    def list_projects(self) -> list[ProjectSummary]:
        index = self._read_index()
        if index is None:
            index = self._rebuild_index()
        summaries = [
            ProjectSummary(id=pid, title=entry["title"], updated_at=int(entry["updated_at"]))
            for pid, entry in index.items()
        ]
        summaries.sort(key=lambda s: (-s.updated_at, s.id))
        return summaries

    # Index maintenance. The index is a cache over the .plan files; if it is
    # missing or unreadable it is rebuilt by scanning the directory.

    def _read_index(self) -> dict[str, dict[str, Any]] | None:
        path = self.root / INDEX_FILE
        try:
            doc = json.loads(path.read_bytes())
            return dict(doc["projects"])
        except (OSError, ValueError, KeyError, TypeError):
            return None

    def _write_index(self, index: dict[str, dict[str, Any]]) -> None:
        body = json.dumps(
            {"projects": index}, sort_keys=True, separators=(",", ":"), ensure_ascii=False
        ).encode("utf-8") + b"\n"
        self._atomic_write(self.root / INDEX_FILE, body)

    def _update_index(self, project: Project) -> None:
        index = self._read_index() or {}
        index[project.id] = {"title": project.title, "updated_at": project.updated_at}
        self._write_index(index)

    def _rebuild_index(self) -> dict[str, dict[str, Any]]:
        index: dict[str, dict[str, Any]] = {}
        for path in sorted(self.root.glob("*.plan")):
            if path.name == INDEX_FILE:
                continue
            try:
                envelope = deserialize_envelope(path.read_bytes())
            except CorruptEnvelope:
                continue
            index[envelope.project.id] = {
                "title": envelope.project.title,
                "updated_at": envelope.project.updated_at,
            }
        self._write_index(index)
        return index


# --- pure envelope updates ---------------------------------------------------

def append_event(envelope: StoredEnvelope, event: Event) -> StoredEnvelope:
    """Append one event, clamping its timestamp so the log stays ordered."""
    events = list(envelope.events)
    if events and event.ts < events[-1].ts:
        event = Event(ts=events[-1].ts, kind=event.kind, payload=event.payload)
    events.append(event)
    return replace(envelope, events=events)


def append_messages(envelope: StoredEnvelope, *messages: ChatMessage) -> StoredEnvelope:
    transcripts = {kind: list(thread) for kind, thread in envelope.transcripts.items()}
    for message in messages:
        transcripts.setdefault(message.section, []).append(message)
    return replace(envelope, transcripts=transcripts)


def with_project(envelope: StoredEnvelope, project: Project) -> StoredEnvelope:
    return replace(envelope, project=project)
