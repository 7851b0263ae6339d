"""Compile a ready plan into a structured app brief plus a build instruction.

Extraction is lexicon-based and deterministic; every free-text string in the
brief is a verbatim span of the plan it came from, so the export stays
traceable back to the student's own words.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import PlannerError
from .plan import Project, SectionKind
from .rubric import (
    context_spans,
    find_matches,
    project_readiness,
    split_sentences,
    user_spans,
)
from .scaffold import Catalog, default_catalog

INSTRUCTION_MAX_CHARS = 800
_GOAL_MAX_CHARS = 240
_NAME_MAX_TOKENS = 5
_TRAILING_JUNK = {
    "and", "or", "a", "an", "the", "of", "to", "in", "on", "for", "with",
    "every", "their", "her", "his", "my", "its", "can",
}


class NotReady(PlannerError):
    """Plan export refused; ``detail['failing']`` lists the failing sections."""


@dataclass(frozen=True)
class Feature:
    name: str
    components: tuple[str, ...]
    behavior: str


@dataclass(frozen=True)
class AppBrief:
    app_name: str
    problem_statement: str
    target_users: tuple[str, ...]
    contexts: tuple[str, ...]
    features: tuple[Feature, ...]
    positive_impacts: tuple[str, ...]
    negative_impacts: tuple[str, ...]


def _tokens_with_spans(sentence: str) -> list[tuple[int, int, str]]:
    return [(m.start(), m.end(), m.group(0)) for m in re.finditer(r"\S+", sentence)]


def _strip_word(token: str) -> str:
    return token.strip(".,;:!?\"'()").lower()


def _feature_name(sentence: str, verbs: set[str]) -> str:
    """First verb phrase (verb plus up to four tokens) or the first five words.

    The name is always a contiguous slice of the sentence.
    """
    tokens = _tokens_with_spans(sentence)
    if not tokens:
        return sentence
    start_idx = 0
    for i, (_, _, token) in enumerate(tokens):
        if _strip_word(token) in verbs:
            start_idx = i
            break
    window = tokens[start_idx: start_idx + _NAME_MAX_TOKENS]
    while len(window) > 1 and _strip_word(window[-1][2]) in _TRAILING_JUNK:
        window.pop()
    name = sentence[window[0][0]: window[-1][1]]
    return name.rstrip(".,;:!?")


def extract_features(design_text: str, *, catalog: Catalog | None = None) -> list[Feature]:
    """One feature per sentence that names at least one UI component."""
    catalog = catalog or default_catalog()
    components = catalog.rubric.lexicon("components")
    verbs = set(catalog.rubric.lexicon("feature_verbs"))
    features: list[Feature] = []
    for sentence in split_sentences(design_text):
        matches = find_matches(sentence, components)
        if not matches:
            continue
        seen: set[str] = set()
        found: list[str] = []
        for m in matches:
            if m.entry not in seen:
                seen.add(m.entry)
                found.append(m.entry)
        features.append(
            Feature(
                name=_feature_name(sentence, verbs),
                components=tuple(found),
                behavior=sentence,
            )
        )
    return features


def build_brief(project: Project, *, catalog: Catalog | None = None) -> AppBrief:
    """Assemble the export. Refuses any plan the rubric gate has not passed."""
    catalog = catalog or default_catalog()
    readiness = project_readiness(project, catalog=catalog)
    if not readiness.ready:
        failing = [k.value for k, ok in readiness.per_section.items() if not ok]
        raise NotReady("plan sections are not ready for export", failing=failing)
    define_text = project.sections[SectionKind.DEFINE].text
    return AppBrief(
        app_name=project.title,
        problem_statement=define_text.strip(),
        target_users=tuple(user_spans(define_text, catalog.rubric)),
        contexts=tuple(context_spans(define_text, catalog.rubric)),
        features=tuple(extract_features(project.sections[SectionKind.DESIGN].text, catalog=catalog)),
        positive_impacts=tuple(split_sentences(project.sections[SectionKind.POSITIVE_IMPACT].text)),
        negative_impacts=tuple(split_sentences(project.sections[SectionKind.NEGATIVE_IMPACT].text)),
    )


def _join(items: tuple[str, ...]) -> str:
    if len(items) <= 1:
        return "".join(items)
    return ", ".join(items[:-1]) + " and " + items[-1]


def _goal_sentence(problem_statement: str) -> str:
    sentences = split_sentences(problem_statement)
    goal = sentences[0] if sentences else problem_statement.strip()
    if len(goal) > _GOAL_MAX_CHARS:
        cut = goal[:_GOAL_MAX_CHARS]
        space = cut.rfind(" ")
        goal = cut[:space] if space > 0 else cut
    if not goal.endswith((".", "!", "?")):
        goal += "."
    return goal


def render_instruction(brief: AppBrief) -> str:
    """One-paragraph build instruction for natural-language app builders.

    At most 800 characters; when features must be elided to fit, whole feature
    clauses are dropped (with the trailing users sentence) so the text always
    ends at a complete clause.
    """
    head = (
        f"Make an app called {brief.app_name} that tackles this problem: "
        f"{_goal_sentence(brief.problem_statement)}"
    )
    users_tail = f" Target users: {_join(brief.target_users)}." if brief.target_users else ""

    def assemble(count: int, include_tail: bool) -> str:
        clauses = [
            f"{f.name} using {_join(f.components)}" for f in brief.features[:count]
        ]
        text = head + " It should have " + "; ".join(clauses) + "."
        return text + (users_tail if include_tail else "")

    full = assemble(len(brief.features), include_tail=True)
    if len(full) <= INSTRUCTION_MAX_CHARS:
        return full
    for count in range(len(brief.features) - 1, 0, -1):
        candidate = assemble(count, include_tail=False)
        if len(candidate) <= INSTRUCTION_MAX_CHARS:
            return candidate
    fallback = assemble(1, include_tail=False)
    if len(fallback) > INSTRUCTION_MAX_CHARS:
        cut = fallback[:INSTRUCTION_MAX_CHARS]
        space = cut.rfind(" ")
        fallback = cut[:space] if space > 0 else cut
    return fallback
