"""Deterministic session replay: run a recorded action script against a fresh store.

With the tick clock, sequential ids, and the mock provider, the same script
and seed always produce byte-identical envelope files — the backbone of the
replay and metrics tests.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Sequence

from . import chat as chat_mod
from . import provider as llm
from . import session
from .plan import SectionKind
from .scaffold import Catalog, default_catalog
from .store import ProjectStore, StoredEnvelope
from .util import SequentialIds, TickClock

REPLAY_EPOCH_MS = 1_700_000_000_000

#: Script actions are plain dicts so scripts can live in JSON files:
#:   {"op": "create", "title": ...}
#:   {"op": "update", "section": ..., "text": ...}
#:   {"op": "chat", "section": ..., "preset_id": ...} or {"op": "chat", "section": ..., "text": ...}
#:   {"op": "evaluate", "section"?: ..., "mode"?: ...}
#:   {"op": "export"}
Script = Sequence[dict[str, Any]]


def make_replay_context(
    store_dir: str | Path,
    *,
    mock_seed: int = 0,
    catalog: Catalog | None = None,
) -> session.AppContext:
    return session.AppContext(
        store=ProjectStore(store_dir),
        catalog=catalog or default_catalog(),
        provider=llm.ProviderConfig(mode="mock", mock_seed=mock_seed),
        clock=TickClock(start_ms=REPLAY_EPOCH_MS),
        id_factory=SequentialIds(prefix="replay-"),
    )


def run_script(script: Script, ctx: session.AppContext) -> StoredEnvelope:
    """Execute a single-project script; returns the final stored envelope.

    Blocked and provider-down turns are recorded (their system replies persist)
    and the replay continues, mirroring what a student would see.
    """
    project_id: str | None = None
    for action in script:
        op = action["op"]
        if op == "create":
            envelope = session.create_project(ctx, action["title"])
            project_id = envelope.project.id
            continue
        if project_id is None:
            raise ValueError("script must create a project before other actions")
        if op == "update":
            session.edit_section(ctx, project_id, SectionKind(action["section"]), action["text"])
        elif op == "chat":
            kind = SectionKind(action["section"])
            chat_input: chat_mod.ChatInput
            if "preset_id" in action:
                chat_input = chat_mod.PresetClick(action["preset_id"])
            else:
                chat_input = chat_mod.FreeText(action["text"])
            try:
                session.chat_turn(ctx, project_id, kind, chat_input)
            except (chat_mod.ModerationBlocked, chat_mod.ProviderUnavailable):
                pass
        elif op == "evaluate":
            section = SectionKind(action["section"]) if "section" in action else None
            session.evaluate(ctx, project_id, section, action.get("mode", "heuristic"))
        elif op == "export":
            session.export_brief(ctx, project_id)
        else:
            raise ValueError(f"unknown script op '{op}'")
    if project_id is None:
        raise ValueError("script did not create a project")
    return ctx.store.load(project_id)
