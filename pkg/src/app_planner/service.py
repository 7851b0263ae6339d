"""HTTP facade: every module operation behind a small JSON API.

Handlers are thin — they parse, delegate to the session layer (which persists
before returning), and serialize. All domain errors funnel through one
exception handler keyed by error class name, so the wire contract stays total:
4xx for caller faults, 502 when the provider is down, 500 otherwise.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any

from fastapi import Depends, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.security.utils import get_authorization_scheme_param
from pydantic import BaseModel, Field

from . import brief as brief_mod
from . import chat as chat_mod
from . import rubric as rubric_mod
from . import session, study
from .errors import PlannerError
from .plan import SectionKind
from .scaffold import preset_catalog
from .store import message_to_dict, project_to_dict

ENV_API_TOKEN = "APP_PLANNER_API_TOKEN"

# Caller faults -> 4xx, provider faults -> 502, everything else -> 500.
ERROR_STATUS: dict[str, int] = {
    "EmptyTitle": 400,
    "TitleTooLong": 400,
    "SectionTooLong": 400,
    "TitleNotEditableHere": 400,
    "InvalidChatInput": 400,
    "NoPresetsForTitle": 400,
    "TitleHasNoRubric": 400,
    "TaskCountNot2": 400,
    "NoParticipants": 400,
    "UnknownPreset": 404,
    "NotFound": 404,
    "NotReady": 409,
    "ModerationBlocked": 422,
    "ProviderUnavailable": 502,
    "ProviderTimeout": 502,
    "ProviderRejected": 502,
    "MalformedReply": 502,
    "EmptyReply": 502,
    "InvalidRequest": 500,
    "CatalogError": 500,
    "StorageFull": 500,
    "SerializationFailure": 500,
    "CorruptEnvelope": 500,
}


def error_status(error: PlannerError) -> int:
    return ERROR_STATUS.get(error.code, 500)


@dataclass
class ServiceSettings:
    ctx: session.AppContext
    api_token: str | None = field(default_factory=lambda: os.environ.get(ENV_API_TOKEN) or None)
    ui_origin: str | None = None


class CreateProjectBody(BaseModel):
    title: str


class SectionBody(BaseModel):
    text: str


class ChatInputBody(BaseModel):
    preset_id: str | None = None
    text: str | None = None


class ChatBody(BaseModel):
    section: str
    input: ChatInputBody


class EvaluateBody(BaseModel):
    section: str | None = None
    mode: str = rubric_mod.MODE_HEURISTIC


class AssignBody(BaseModel):
    participant_ids: list[str] = Field(default_factory=list)
    task_ids: list[str] = Field(default_factory=list)


def _section(value: str, allow_title: bool = False) -> SectionKind:
    try:
        kind = SectionKind(value)
    except ValueError:
        raise chat_mod.InvalidChatInput(f"unknown section '{value}'") from None
    if kind == SectionKind.TITLE and not allow_title:
        raise chat_mod.InvalidChatInput("the title box is not addressable here")
    return kind


def _preset_to_dict(preset: Any) -> dict[str, Any]:
    return {
        "id": preset.id,
        "section": preset.section.value,
        "label": preset.label,
        "response_template": preset.response_template,
    }


def _result_to_dict(result: rubric_mod.RubricResult) -> dict[str, Any]:
    return {
        "section": result.section.value,
        "mode": result.mode,
        "section_ready": result.section_ready,
        "generated_at": result.generated_at,
        "scores": [
            {
                "criterion_id": s.criterion_id,
                "score": s.score,
                "evidence": s.evidence,
                "feedback": s.feedback,
            }
            for s in result.scores
        ],
        "feedback_messages": rubric_mod.feedback_messages(result),
    }


def _brief_to_dict(built: brief_mod.AppBrief) -> dict[str, Any]:
    return {
        "app_name": built.app_name,
        "problem_statement": built.problem_statement,
        "target_users": list(built.target_users),
        "contexts": list(built.contexts),
        "features": [
            {"name": f.name, "components": list(f.components), "behavior": f.behavior}
            for f in built.features
        ],
        "positive_impacts": list(built.positive_impacts),
        "negative_impacts": list(built.negative_impacts),
    }


def _readiness_to_dict(readiness: rubric_mod.Readiness) -> dict[str, Any]:
    return {
        "ready": readiness.ready,
        "per_section": {kind.value: ok for kind, ok in readiness.per_section.items()},
    }


def create_app(settings: ServiceSettings) -> FastAPI:
    app = FastAPI(title="App Planner", docs_url=None, redoc_url=None)
    ctx = settings.ctx

    if settings.ui_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[settings.ui_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    async def require_token(request: Request) -> None:
        if settings.api_token is None:
            return
        scheme, param = get_authorization_scheme_param(request.headers.get("Authorization", ""))
        if scheme.lower() != "bearer" or param != settings.api_token:
            raise _Unauthorized()

    guarded = [Depends(require_token)]

    @app.exception_handler(PlannerError)
    async def planner_error_handler(_request: Request, exc: PlannerError) -> JSONResponse:
        body: dict[str, Any] = {"code": exc.code, "message": str(exc), "detail": exc.detail}
        if isinstance(exc, (chat_mod.ModerationBlocked, chat_mod.ProviderUnavailable)):
            body["student_echo"] = message_to_dict(exc.turn.student_echo)
            body["planner_reply"] = message_to_dict(exc.turn.planner_reply)
        return JSONResponse(status_code=error_status(exc), content=body)

    @app.exception_handler(_Unauthorized)
    async def unauthorized_handler(_request: Request, _exc: "_Unauthorized") -> JSONResponse:
        return JSONResponse(
            status_code=401,
            content={"code": "Unauthorized", "message": "missing or invalid bearer token",
                     "detail": {}},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"code": "Validation", "message": "request body failed validation",
                     "detail": {"errors": [str(e.get("msg", e)) for e in exc.errors()]}},
        )

    @app.get("/health")
    async def health() -> dict[str, str]:
        return {"status": "ok"}

    @app.post("/projects", status_code=201, dependencies=guarded)
    def create_project(body: CreateProjectBody) -> dict[str, Any]:
        envelope = session.create_project(ctx, body.title)
        return {"project": project_to_dict(envelope.project)}

    @app.get("/projects", dependencies=guarded)
    def list_projects() -> dict[str, Any]:
        return {
            "projects": [
                {"id": s.id, "title": s.title, "updated_at": s.updated_at}
                for s in ctx.store.list_projects()
            ]
        }

    @app.get("/projects/{project_id}", dependencies=guarded)
    def get_project(project_id: str) -> dict[str, Any]:
        envelope = ctx.store.load(project_id)
        return {
            "project": project_to_dict(envelope.project),
            "readiness": _readiness_to_dict(session.readiness(ctx, envelope.project)),
        }

    @app.patch("/projects/{project_id}/sections/{kind}", dependencies=guarded)
    def patch_section(project_id: str, kind: str, body: SectionBody) -> dict[str, Any]:
        envelope = session.edit_section(ctx, project_id, _section(kind, allow_title=True), body.text)
        return {"project": project_to_dict(envelope.project)}

    @app.get("/sections/{kind}/presets", dependencies=guarded)
    def get_presets(kind: str) -> dict[str, Any]:
        presets = preset_catalog(_section(kind, allow_title=True), ctx.catalog)
        return {"presets": [_preset_to_dict(p) for p in presets]}

    @app.get("/sections/{kind}/guidance", dependencies=guarded)
    def get_guidance(kind: str) -> dict[str, Any]:
        card = ctx.catalog.guidance[_section(kind)]
        return {
            "guidance": {
                "section": card.section.value,
                "prompt_text": card.prompt_text,
                "example_text": card.example_text,
                "review": card.review,
            }
        }

    @app.post("/projects/{project_id}/chat", dependencies=guarded)
    def post_chat(project_id: str, body: ChatBody) -> dict[str, Any]:
        kind = _section(body.section)
        if body.input.preset_id is not None:
            chat_input: chat_mod.ChatInput = chat_mod.PresetClick(body.input.preset_id)
        elif body.input.text is not None:
            chat_input = chat_mod.FreeText(body.input.text)
        else:
            raise chat_mod.InvalidChatInput("chat input needs either preset_id or text")
        _envelope, turn = session.chat_turn(ctx, project_id, kind, chat_input)
        return {
            "student_echo": message_to_dict(turn.student_echo),
            "planner_reply": message_to_dict(turn.planner_reply),
        }

    @app.get("/projects/{project_id}/transcript", dependencies=guarded)
    def get_transcript(project_id: str, section: str | None = Query(default=None)) -> dict[str, Any]:
        kind = _section(section) if section else None
        messages = session.transcript(ctx, project_id, kind)
        return {"messages": [message_to_dict(m) for m in messages]}

    @app.post("/projects/{project_id}/evaluate", dependencies=guarded)
    def post_evaluate(project_id: str, body: EvaluateBody) -> dict[str, Any]:
        kind = _section(body.section) if body.section else None
        _envelope, results = session.evaluate(ctx, project_id, kind, body.mode)
        return {"results": [_result_to_dict(r) for r in results]}

    @app.get("/projects/{project_id}/brief", dependencies=guarded)
    def get_brief(project_id: str) -> dict[str, Any]:
        built, instruction = session.read_brief(ctx, project_id)
        return {"brief": _brief_to_dict(built), "instruction": instruction}

    @app.post("/study/assign", dependencies=guarded)
    def post_assign(body: AssignBody) -> dict[str, Any]:
        assignments = study.assign_conditions(body.participant_ids, body.task_ids)
        return {
            "assignments": [
                {
                    "participant_id": a.participant_id,
                    "tasks": [
                        {"task_id": t.task_id, "condition": t.condition} for t in a.tasks
                    ],
                }
                for a in assignments
            ]
        }

    return app


class _Unauthorized(Exception):
    pass
