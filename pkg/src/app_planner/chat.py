"""Chat turn routing: preset clicks answered by rules, typed queries by the model.

Each section keeps its own thread; cross-section awareness travels in the
prompt's context block, never in the history. Every successful turn appends
exactly two messages: the student's echo and the planner's reply. Moderation
and provider failures still produce a visible system reply so the student is
never left hanging.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Sequence

from . import provider as llm
from .errors import PlannerError
from .plan import CHAT_SECTIONS, Project, SectionKind
from .scaffold import Catalog, default_catalog, rule_response

FREE_TEXT_MAX_CHARS = 2_000
HISTORY_WINDOW_DEFAULT = 8
PROMPT_BUDGET_TOKENS = 3_000
CHARS_PER_TOKEN = 4  # crude budget approximation; exactness is not required

REPLY_MAX_CHARS = 1_500

ROLE_STUDENT = "student"
ROLE_PLANNER = "planner"

ORIGIN_RULE = "rule"
ORIGIN_MODEL = "model"
ORIGIN_SYSTEM = "system"

_ENCOURAGEMENT_PATTERN = re.compile(
    r"\b(great|good|nice|love|well done|interesting)\b", re.IGNORECASE
)

_ENCOURAGEMENT_LINES = (
    "Great thinking so far!",
    "Nice progress — keep building on it!",
    "Good question to be asking!",
    "I love where this is going!",
    "Interesting idea — let's push it further!",
    "Well done getting this far!",
)

_STAGE_GOALS = {
    SectionKind.DEFINE: "help the student state the problem, the target users, and the context",
    SectionKind.DESIGN: "help the student turn the goal into concrete features and UI components",
    SectionKind.POSITIVE_IMPACT: "help the student articulate who benefits and how",
    SectionKind.NEGATIVE_IMPACT: "help the student surface risks like privacy, distraction, and fairness",
}

_BLOCKED_REPLY = (
    "Let's keep our chat focused on planning your app. "
    "Try one of the question bubbles, or ask about your users, features, or impacts."
)

_UNAVAILABLE_REPLY = (
    "I can't reach my ideas service right now. "
    "Try one of the question bubbles — those always work — or ask me again in a moment."
)

# Local denylist, matched on word boundaries. First category in this order
# wins. Deployments can extend the lists; a hosted moderation service can be
# slotted in behind moderate_input without touching the routing.
_DENYLIST: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("self_harm", ("kill myself", "hurt myself", "suicide", "self-harm", "cutting myself")),
    ("violence", ("kill someone", "kill people", "hurt someone", "shoot someone",
                  "make a bomb", "make a weapon", "attack someone")),
    ("profanity", ("fuck", "fucking", "shit", "bitch", "asshole", "dick", "bastard", "piss")),
    ("sexual_content", ("porn", "nude", "nudes", "sexting", "explicit photos")),
    ("harassment", ("i hate you", "you suck", "stupid bot", "shut up")),
)

_DENYLIST_COMPILED = tuple(
    (category, re.compile(r"\b(?:" + "|".join(re.escape(t) for t in terms) + r")\b", re.IGNORECASE))
    for category, terms in _DENYLIST
)


class InvalidChatInput(PlannerError):
    pass


class EmptyReply(PlannerError):
    pass


class ModerationBlocked(PlannerError):
    """Input failed the safety screen. ``turn`` holds the echo and the redirect."""

    def __init__(self, message: str, turn: "ChatTurn", **detail: object) -> None:
        super().__init__(message, **detail)
        self.turn = turn


class ProviderUnavailable(PlannerError):
    """Provider failed after retries. ``turn`` holds the echo and the fallback."""

    def __init__(self, message: str, turn: "ChatTurn", **detail: object) -> None:
        super().__init__(message, **detail)
        self.turn = turn


@dataclass(frozen=True)
class PresetClick:
    question_id: str


@dataclass(frozen=True)
class FreeText:
    text: str


ChatInput = PresetClick | FreeText


@dataclass(frozen=True)
class ChatMessage:
    id: str
    project_id: str
    section: SectionKind
    role: str  # student | planner
    origin: str  # rule | model | system
    text: str
    created_at: int

    def __post_init__(self) -> None:
        if self.role not in (ROLE_STUDENT, ROLE_PLANNER):
            raise ValueError(f"invalid role '{self.role}'")
        if self.origin not in (ORIGIN_RULE, ORIGIN_MODEL, ORIGIN_SYSTEM):
            raise ValueError(f"invalid origin '{self.origin}'")
        if self.role == ROLE_STUDENT and self.origin == ORIGIN_SYSTEM:
            raise ValueError("student messages cannot carry origin=system")


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    context_text: str
    history: tuple[ChatMessage, ...]
    query: str


@dataclass(frozen=True)
class ChatTurn:
    student_echo: ChatMessage
    planner_reply: ChatMessage
    outcome: str  # rule | model | blocked | unavailable


@dataclass(frozen=True)
class Allowed:
    pass


@dataclass(frozen=True)
class Blocked:
    reason: str


def moderate_input(text: str) -> Allowed | Blocked:
    """Deterministic local denylist screen. Never calls the provider."""
    for category, pattern in _DENYLIST_COMPILED:
        if pattern.search(text):
            return Blocked(reason=category)
    return Allowed()


def assemble_prompt(
    project: Project,
    kind: SectionKind,
    history: Sequence[ChatMessage],
    query: str,
    *,
    catalog: Catalog | None = None,
    history_window: int = HISTORY_WINDOW_DEFAULT,
) -> PromptBundle:
    """Build the model prompt: persona + stage, plan context, recent section history.

    Over-budget bundles are trimmed, never rejected: history goes first
    (oldest turns dropped), then the context block loses its tail.
    """
    catalog = catalog or default_catalog()
    card = catalog.guidance[kind]
    system_text = (
        "You are App Planner, a friendly planning coach for a student designing a mobile app. "
        f"Current stage: {kind.label}. Your goal: {_STAGE_GOALS[kind]}. "
        f"Stage instructions: {card.prompt_text} "
        "Ask guiding questions and offer short examples. Do not write the student's plan "
        "for them. Keep replies under 120 words and end with one question."
    )
    lines = [f"Project title: {project.title}"]
    for section in CHAT_SECTIONS:
        text = project.sections[section].text.strip()
        if text:
            lines.append(f"{section.label}: {text}")
    context_text = "\n".join(lines)

    window = [m for m in history if m.section == kind][-history_window:]
    budget = PROMPT_BUDGET_TOKENS * CHARS_PER_TOKEN

    def rendered_size(ctx: str, msgs: list[ChatMessage]) -> int:
        return len(system_text) + len(ctx) + sum(len(m.text) for m in msgs) + len(query)

    while window and rendered_size(context_text, window) > budget:
        window.pop(0)
    if rendered_size(context_text, window) > budget:
        overflow = rendered_size(context_text, window) - budget
        context_text = context_text[: max(len(lines[0]), len(context_text) - overflow)]
    return PromptBundle(
        system_text=system_text,
        context_text=context_text,
        history=tuple(window),
        query=query,
    )


def _bundle_to_request(bundle: PromptBundle, config: llm.ProviderConfig) -> llm.ModelRequest:
    messages = [llm.ModelMessage("system", bundle.system_text + "\n\n" + bundle.context_text)]
    history = list(bundle.history)
    # The wire format wants strict user/assistant alternation starting at user.
    while history and history[0].role == ROLE_PLANNER:
        history.pop(0)
    previous = "system"
    for msg in history:
        role = "user" if msg.role == ROLE_STUDENT else "assistant"
        if role == previous:
            continue
        messages.append(llm.ModelMessage(role, msg.text))
        previous = role
    if previous == "user":
        messages.pop()
    messages.append(llm.ModelMessage("user", bundle.query))
    return llm.ModelRequest(model=config.model, messages=tuple(messages))


def postprocess_reply(raw: str, *, rotation: int = 0) -> str:
    """Trim, cap at a sentence boundary, and guarantee one encouragement note."""
    text = raw.strip()
    if not text:
        raise EmptyReply("model reply was empty")
    if len(text) > REPLY_MAX_CHARS:
        cut = text[:REPLY_MAX_CHARS]
        boundary = max(cut.rfind("."), cut.rfind("!"), cut.rfind("?"))
        if boundary > 0:
            cut = cut[: boundary + 1]
        else:
            space = cut.rfind(" ")
            if space > 0:
                cut = cut[:space]
        text = cut.strip()
    if not _ENCOURAGEMENT_PATTERN.search(text):
        line = _ENCOURAGEMENT_LINES[rotation % len(_ENCOURAGEMENT_LINES)]
        text = f"{line}\n\n{text}"
    return text


def handle_message(
    project: Project,
    kind: SectionKind,
    chat_input: ChatInput,
    history: Sequence[ChatMessage],
    *,
    catalog: Catalog | None = None,
    provider_config: llm.ProviderConfig | None = None,
    next_seq: int = 0,
    now_fn: Callable[[], int] | None = None,
    history_window: int = HISTORY_WINDOW_DEFAULT,
    complete_fn: Callable[[llm.ModelRequest, llm.ProviderConfig], llm.ModelReply] | None = None,
) -> ChatTurn:
    """Run one chat turn and return the two messages to append.

    Preset clicks are answered by the rule layer with zero provider calls;
    free text makes exactly one provider call (bounded retries live inside the
    provider). ``history`` is the current section's transcript; ``next_seq``
    is the count of messages already stored for the project, used to mint ids.
    Raises ModerationBlocked / ProviderUnavailable with the turn attached so
    the caller can still persist and display the system reply.
    """
    if kind == SectionKind.TITLE:
        raise InvalidChatInput("the title box has no chat thread")
    catalog = catalog or default_catalog()
    config = provider_config or llm.ProviderConfig()
    complete = complete_fn or llm.complete
    now_fn = now_fn or _wall_ms
    last_ts = history[-1].created_at if history else 0

    def message(role: str, origin: str, text: str, offset: int, ts_floor: int) -> ChatMessage:
        return ChatMessage(
            id=f"m{next_seq + offset}",
            project_id=project.id,
            section=kind,
            role=role,
            origin=origin,
            text=text,
            created_at=max(now_fn(), ts_floor),
        )

    if isinstance(chat_input, PresetClick):
        reply_text = rule_response(chat_input.question_id, project, catalog)  # UnknownPreset here
        preset = catalog.presets[chat_input.question_id]
        echo = message(ROLE_STUDENT, ORIGIN_RULE, preset.label, 1, last_ts)
        reply = message(ROLE_PLANNER, ORIGIN_RULE, reply_text, 2, echo.created_at)
        return ChatTurn(echo, reply, outcome="rule")

    query = chat_input.text.strip()
    if not query:
        raise InvalidChatInput("chat text is blank")
    if len(chat_input.text) > FREE_TEXT_MAX_CHARS:
        raise InvalidChatInput(
            f"chat text exceeds {FREE_TEXT_MAX_CHARS} characters",
            length=len(chat_input.text),
        )

    verdict = moderate_input(query)
    if isinstance(verdict, Blocked):
        echo = message(ROLE_STUDENT, ORIGIN_MODEL, query, 1, last_ts)
        reply = message(ROLE_PLANNER, ORIGIN_SYSTEM, _BLOCKED_REPLY, 2, echo.created_at)
        raise ModerationBlocked(
            f"input blocked by the {verdict.reason} screen",
            ChatTurn(echo, reply, outcome="blocked"),
            reason=verdict.reason,
        )

    echo = message(ROLE_STUDENT, ORIGIN_MODEL, query, 1, last_ts)
    bundle = assemble_prompt(
        project, kind, history, query, catalog=catalog, history_window=history_window
    )
    request = _bundle_to_request(bundle, config)
    rotation = sum(1 for m in history if m.role == ROLE_PLANNER and m.origin == ORIGIN_MODEL)
    try:
        model_reply = complete(request, config)
        reply_text = postprocess_reply(model_reply.content, rotation=rotation)
    except (llm.ProviderTimeout, llm.ProviderRejected, llm.MalformedReply, EmptyReply) as exc:
        reply = message(ROLE_PLANNER, ORIGIN_SYSTEM, _UNAVAILABLE_REPLY, 2, echo.created_at)
        raise ProviderUnavailable(
            f"provider unavailable: {exc}",
            ChatTurn(echo, reply, outcome="unavailable"),
            cause=exc.code,
        ) from exc
    reply = message(ROLE_PLANNER, ORIGIN_MODEL, reply_text, 2, echo.created_at)
    return ChatTurn(echo, reply, outcome="model")


def _wall_ms() -> int:
    from .util import SystemClock

    return SystemClock().now_ms()
