"""Plan document model: the five-box project scaffold and its structural checks.

A project is a pure value. Every operation returns a new ``Project``; callers
that need durability hand the result to the store. The five boxes are Title
plus four chat-enabled sections worked in a fixed scaffold order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .errors import PlannerError
from .util import random_id

TITLE_MAX_CHARS = 200
SECTION_MAX_CHARS = 10_000

#: Sentinel value of ``stage_cursor`` once every section has text.
STAGE_COMPLETE = "complete"


class SectionKind(str, Enum):
    """The five boxes, declared in scaffold order."""

    TITLE = "title"
    DEFINE = "define"
    DESIGN = "design"
    POSITIVE_IMPACT = "positive_impact"
    NEGATIVE_IMPACT = "negative_impact"

    @property
    def label(self) -> str:
        return self.value.replace("_", " ").title()


#: The four sections that carry a chat thread and a rubric, in work order.
CHAT_SECTIONS: tuple[SectionKind, ...] = (
    SectionKind.DEFINE,
    SectionKind.DESIGN,
    SectionKind.POSITIVE_IMPACT,
    SectionKind.NEGATIVE_IMPACT,
)


class IssueCode(str, Enum):
    EMPTY = "empty"
    TOO_LONG = "too_long"
    TITLE_MISSING = "title_missing"


# One message template per code; the code alone determines the wording.
_ISSUE_TEMPLATES = {
    IssueCode.EMPTY: "The {section} section is empty.",
    IssueCode.TOO_LONG: "The {section} section exceeds {limit:,} characters.",
    IssueCode.TITLE_MISSING: "The project title is missing.",
}


class EmptyTitle(PlannerError):
    pass


class TitleTooLong(PlannerError):
    pass


class SectionTooLong(PlannerError):
    pass


class TitleNotEditableHere(PlannerError):
    pass


@dataclass(frozen=True)
class SectionContent:
    text: str = ""
    last_edited_at: int = 0
    revision: int = 0


@dataclass(frozen=True)
class Project:
    id: str
    title: str
    sections: dict[SectionKind, SectionContent]
    stage_cursor: "SectionKind | str"
    created_at: int
    updated_at: int
    schema_version: int = 1


@dataclass(frozen=True)
class ValidationIssue:
    section: SectionKind
    code: IssueCode
    message: str


def _issue(section: SectionKind, code: IssueCode) -> ValidationIssue:
    message = _ISSUE_TEMPLATES[code].format(
        section=section.label.lower(), limit=SECTION_MAX_CHARS
    )
    return ValidationIssue(section=section, code=code, message=message)


def stage_cursor_for(sections: dict[SectionKind, SectionContent]) -> "SectionKind | str":
    """First section in scaffold order with blank text, else the complete sentinel."""
    for kind in CHAT_SECTIONS:
        if not sections[kind].text.strip():
            return kind
    return STAGE_COMPLETE


def _clean_title(title: str) -> str:
    cleaned = title.strip()
    if not cleaned:
        raise EmptyTitle("project title is required")
    if len(cleaned) > TITLE_MAX_CHARS:
        raise TitleTooLong(
            f"project title exceeds {TITLE_MAX_CHARS} characters",
            length=len(cleaned),
        )
    return cleaned


def new_project(
    title: str,
    *,
    project_id: str | None = None,
    now_ms: int | None = None,
) -> Project:
    """Create a fresh project with all four sections empty and the cursor on Define."""
    cleaned = _clean_title(title)
    now = _now(now_ms)
    sections = {kind: SectionContent(text="", last_edited_at=now) for kind in CHAT_SECTIONS}
    return Project(
        id=project_id or random_id(),
        title=cleaned,
        sections=sections,
        stage_cursor=SectionKind.DEFINE,
        created_at=now,
        updated_at=now,
    )


def update_section(
    project: Project,
    kind: SectionKind,
    text: str,
    *,
    now_ms: int | None = None,
) -> Project:
    """Replace one section's text, bumping its revision and recomputing the cursor.

    Clearing a section is allowed and moves the cursor back to it.
    """
    if kind == SectionKind.TITLE:
        raise TitleNotEditableHere("the title is renamed via rename_project, not as a section")
    if len(text) > SECTION_MAX_CHARS:
        raise SectionTooLong(
            f"section text exceeds {SECTION_MAX_CHARS} characters",
            section=kind.value,
            length=len(text),
        )
    # Clamp against stored time so updated_at never regresses below created_at.
    now = max(_now(now_ms), project.updated_at)
    old = project.sections[kind]
    sections = dict(project.sections)
    sections[kind] = SectionContent(text=text, last_edited_at=now, revision=old.revision + 1)
    return replace(
        project,
        sections=sections,
        updated_at=now,
        stage_cursor=stage_cursor_for(sections),
    )


def rename_project(project: Project, title: str, *, now_ms: int | None = None) -> Project:
    cleaned = _clean_title(title)
    now = max(_now(now_ms), project.updated_at)
    return replace(project, title=cleaned, updated_at=now)


def validate_structure(project: Project) -> list[ValidationIssue]:
    """Structural issues only: blank sections, oversized text, missing title.

    Pure: the same project value always yields the same issue list.
    """
    issues: list[ValidationIssue] = []
    if not project.title.strip():
        issues.append(_issue(SectionKind.TITLE, IssueCode.TITLE_MISSING))
    for kind in CHAT_SECTIONS:
        content = project.sections[kind]
        if not content.text.strip():
            issues.append(_issue(kind, IssueCode.EMPTY))
        elif len(content.text) > SECTION_MAX_CHARS:
            issues.append(_issue(kind, IssueCode.TOO_LONG))
    return issues


def _now(now_ms: int | None) -> int:
    if now_ms is not None:
        return now_ms
    from .util import SystemClock

    return SystemClock().now_ms()
