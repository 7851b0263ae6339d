"""Formative rubric grading for plan sections.

The heuristic grader is the deterministic gate: existence-based lexicon
detectors score each criterion 0 (absent) / 1 (partial) / 2 (strong), so a
section's scores never drop as the student writes more. Model-graded mode is
advisory only; it reuses the provider with a strict machine-readable reply and
falls back to the heuristic scores when the reply cannot be parsed.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from typing import Callable

from . import provider as llm
from .errors import PlannerError
from .plan import CHAT_SECTIONS, Project, SectionKind
from .scaffold import Catalog, RubricConfig, default_catalog

log = logging.getLogger(__name__)

MODE_HEURISTIC = "heuristic"
MODE_MODEL = "model"

_GRADING_TEMPERATURE = 0.0

# Tokens shared by almost any plan; excluded from goal-linkage overlap.
_STOPWORDS = frozenset(
    """the and that this with from they them their your would could should have has
    had will when where what which while because about into over under after before
    there here these those then than also just very some such each every other more
    most like want wants make makes made using use used app apps application being
    been were does doing only even much many still need needs really thing things
    something everything people person"""
    .split()
)


class TitleHasNoRubric(PlannerError):
    pass


@dataclass(frozen=True)
class RubricCriterion:
    id: str
    section: SectionKind
    description: str
    detector: "Callable[[Project, RubricConfig], tuple[int, list[str]]]"


@dataclass(frozen=True)
class CriterionScore:
    criterion_id: str
    score: int  # 0 absent, 1 partial, 2 strong
    evidence: str  # contiguous span of the section text, or ""
    feedback: str  # one formative sentence; empty only for strong scores


@dataclass(frozen=True)
class RubricResult:
    section: SectionKind
    scores: tuple[CriterionScore, ...]
    section_ready: bool
    generated_at: int
    mode: str


@dataclass(frozen=True)
class Readiness:
    ready: bool
    per_section: dict[SectionKind, bool]


@dataclass(frozen=True)
class _Match:
    entry: str
    start: int
    end: int
    span: str


def _compile(entries: tuple[str, ...]) -> re.Pattern[str]:
    ordered = sorted(entries, key=len, reverse=True)
    return re.compile(
        r"\b(?:" + "|".join(re.escape(e) for e in ordered) + r")\b", re.IGNORECASE
    )


def find_matches(text: str, entries: tuple[str, ...]) -> list[_Match]:
    """Whole-word, case-insensitive matches; longer lexicon phrases win overlaps."""
    if not text:
        return []
    out = []
    for m in _compile(entries).finditer(text):
        out.append(_Match(entry=m.group(0).lower(), start=m.start(), end=m.end(), span=m.group(0)))
    return out


def _distinct(matches: list[_Match]) -> set[str]:
    return {m.entry for m in matches}


def _span_over(text: str, matches: list[_Match]) -> str:
    """Contiguous slice covering all matches (always a substring of ``text``)."""
    if not matches:
        return ""
    return text[min(m.start for m in matches): max(m.end for m in matches)]


def _first_span(matches: list[_Match]) -> str:
    return matches[0].span if matches else ""


def _content_words(text: str) -> set[str]:
    tokens = re.findall(r"[A-Za-z']+", text.lower())
    return {t for t in tokens if len(t) >= 4 and t not in _STOPWORDS}


_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")


def split_sentences(text: str) -> list[str]:
    """Naive splitter; every returned sentence is a contiguous slice of the input."""
    return [part.strip() for part in _SENTENCE_SPLIT.split(text.strip()) if part.strip()]


# --- Detectors. Each returns (score, evidence_spans). -----------------------

def _detect_problem(project: Project, cfg: RubricConfig) -> tuple[int, list[str]]:
    text = project.sections[SectionKind.DEFINE].text
    matches = find_matches(text, cfg.lexicon("problem_words"))
    framed = bool(matches)
    long_enough = len(text.split()) >= 15
    score = 2 if (framed and long_enough) else 1 if (framed or long_enough) else 0
    return score, [m.span for m in matches]


def _detect_users(project: Project, cfg: RubricConfig) -> tuple[int, list[str]]:
    text = project.sections[SectionKind.DEFINE].text
    strong = find_matches(text, cfg.lexicon("user_roles"))
    generic = find_matches(text, cfg.lexicon("generic_users"))
    if strong:
        return 2, [m.span for m in strong]
    if generic:
        return 1, [m.span for m in generic]
    return 0, []


def _detect_context(project: Project, cfg: RubricConfig) -> tuple[int, list[str]]:
    text = project.sections[SectionKind.DEFINE].text
    times = find_matches(text, cfg.lexicon("time_cues"))
    places = find_matches(text, cfg.lexicon("place_cues"))
    both = times + places
    if times and places:
        return 2, [_span_over(text, both)]
    if both:
        return 1, [m.span for m in both]
    return 0, []


def _detect_feature(project: Project, cfg: RubricConfig) -> tuple[int, list[str]]:
    text = project.sections[SectionKind.DESIGN].text
    verbs = cfg.lexicon("feature_verbs")
    components = cfg.lexicon("components")
    best = 0
    spans: list[str] = []
    for sentence in split_sentences(text):
        verb_hits = find_matches(sentence, verbs)
        if not verb_hits:
            continue
        spans.extend(m.span for m in verb_hits)
        best = max(best, 2 if find_matches(sentence, components) else 1)
    return best, spans


def _detect_component(project: Project, cfg: RubricConfig) -> tuple[int, list[str]]:
    text = project.sections[SectionKind.DESIGN].text
    matches = find_matches(text, cfg.lexicon("components"))
    distinct = _distinct(matches)
    score = 2 if len(distinct) >= 2 else 1 if distinct else 0
    return score, [m.span for m in matches]


def _detect_goal_link(project: Project, cfg: RubricConfig) -> tuple[int, list[str]]:
    design_text = project.sections[SectionKind.DESIGN].text
    define_words = _content_words(project.sections[SectionKind.DEFINE].text)
    if not design_text.strip():
        return 0, []
    if not define_words:
        # Nothing to link against yet; do not penalize the Design box for it.
        return 2, []
    overlap = sorted(_content_words(design_text) & define_words)
    score = 2 if len(overlap) >= 2 else 1 if overlap else 0
    spans = []
    for word in overlap[:3]:
        m = re.search(r"\b" + re.escape(word) + r"\b", design_text, re.IGNORECASE)
        if m:
            spans.append(m.group(0))
    return score, spans


def _detect_benefit(project: Project, cfg: RubricConfig) -> tuple[int, list[str]]:
    text = project.sections[SectionKind.POSITIVE_IMPACT].text
    matches = find_matches(text, cfg.lexicon("benefit_words"))
    distinct = _distinct(matches)
    score = 2 if len(distinct) >= 2 else 1 if distinct else 0
    return score, [m.span for m in matches]


def _detect_audience(project: Project, cfg: RubricConfig) -> tuple[int, list[str]]:
    text = project.sections[SectionKind.POSITIVE_IMPACT].text
    strong = find_matches(text, cfg.lexicon("user_roles"))
    generic = find_matches(text, cfg.lexicon("generic_users"))
    if strong:
        return 2, [m.span for m in strong]
    if generic:
        return 1, [m.span for m in generic]
    return 0, []


def _detect_risk_named(project: Project, cfg: RubricConfig) -> tuple[int, list[str]]:
    text = project.sections[SectionKind.NEGATIVE_IMPACT].text
    matches = find_matches(text, cfg.lexicon("risk_words"))
    distinct = _distinct(matches)
    score = 2 if len(distinct) >= 2 else 1 if distinct else 0
    return score, [m.span for m in matches]


def _detect_risk_explained(project: Project, cfg: RubricConfig) -> tuple[int, list[str]]:
    text = project.sections[SectionKind.NEGATIVE_IMPACT].text
    risks = cfg.lexicon("risk_words")
    best = 0
    spans: list[str] = []
    for sentence in split_sentences(text):
        hits = find_matches(sentence, risks)
        if not hits:
            continue
        spans.extend(m.span for m in hits)
        best = max(best, 2 if len(sentence.split()) >= 8 else 1)
    return best, spans


_FEEDBACK = {
    "define.problem": "Describe the problem in a sentence or two: what goes wrong, and why does it matter?",
    "define.users": "Name your target users: who exactly will use this app?",
    "define.context": "Add when and where the problem happens — a time and a place.",
    "design.feature": "Describe at least one feature as an action: what can the user do with it?",
    "design.component": "Mention the interface pieces you would use, like a button, a list view, or a text box.",
    "design.goal_link": "Connect the design back to your problem: reuse the key words from your problem statement.",
    "positive.benefit": "State a concrete benefit: how exactly are people better off?",
    "positive.audience": "Say who feels the positive impact: which users or groups?",
    "negative.risk_named": "Name at least one risk, such as privacy, distraction, or screen time.",
    "negative.risk_explained": "Explain one risk in a full sentence: what could go wrong, and for whom?",
}

CRITERIA: dict[SectionKind, tuple[RubricCriterion, ...]] = {
    SectionKind.DEFINE: (
        RubricCriterion("define.problem", SectionKind.DEFINE,
                        "The problem is stated as a real need", _detect_problem),
        RubricCriterion("define.users", SectionKind.DEFINE,
                        "Target users are named", _detect_users),
        RubricCriterion("define.context", SectionKind.DEFINE,
                        "The time and place of the problem are given", _detect_context),
    ),
    SectionKind.DESIGN: (
        RubricCriterion("design.feature", SectionKind.DESIGN,
                        "At least one feature is described as an action", _detect_feature),
        RubricCriterion("design.component", SectionKind.DESIGN,
                        "Concrete UI components are named", _detect_component),
        RubricCriterion("design.goal_link", SectionKind.DESIGN,
                        "The design connects back to the defined problem", _detect_goal_link),
    ),
    SectionKind.POSITIVE_IMPACT: (
        RubricCriterion("positive.benefit", SectionKind.POSITIVE_IMPACT,
                        "A concrete benefit is stated", _detect_benefit),
        RubricCriterion("positive.audience", SectionKind.POSITIVE_IMPACT,
                        "The people who benefit are named", _detect_audience),
    ),
    SectionKind.NEGATIVE_IMPACT: (
        RubricCriterion("negative.risk_named", SectionKind.NEGATIVE_IMPACT,
                        "At least one risk is named", _detect_risk_named),
        RubricCriterion("negative.risk_explained", SectionKind.NEGATIVE_IMPACT,
                        "At least one risk is explained in a full sentence", _detect_risk_explained),
    ),
}


def _section_ready(scores: tuple[CriterionScore, ...], cfg: RubricConfig) -> bool:
    if not scores:
        return False
    values = [s.score for s in scores]
    return min(values) >= cfg.min_score and sum(values) / len(values) >= cfg.min_mean


def _heuristic_scores(project: Project, kind: SectionKind, cfg: RubricConfig) -> tuple[CriterionScore, ...]:
    scores = []
    for criterion in CRITERIA[kind]:
        score, spans = criterion.detector(project, cfg)
        evidence = spans[0] if (spans and score > 0) else ""
        feedback = "" if score >= 2 else _FEEDBACK[criterion.id]
        scores.append(CriterionScore(criterion.id, score, evidence, feedback))
    return tuple(scores)


def evaluate_section(
    project: Project,
    kind: SectionKind,
    mode: str = MODE_HEURISTIC,
    *,
    catalog: Catalog | None = None,
    provider_config: "llm.ProviderConfig | None" = None,
    complete_fn: "Callable[[llm.ModelRequest, llm.ProviderConfig], llm.ModelReply] | None" = None,
    now_ms: int = 0,
) -> RubricResult:
    """Score one section. Heuristic mode is pure; model mode is advisory.

    Model mode short-circuits to the heuristic for blank text, and falls back
    to the heuristic scores (with a logged warning) when the provider reply is
    not parseable — so the result is always well formed.
    """
    if kind == SectionKind.TITLE:
        raise TitleHasNoRubric("the title box is not rubric-scored")
    catalog = catalog or default_catalog()
    cfg = catalog.rubric
    text = project.sections[kind].text
    scores = _heuristic_scores(project, kind, cfg)
    used_mode = MODE_HEURISTIC
    if mode == MODE_MODEL and text.strip():
        model_scores = _model_scores(project, kind, cfg, provider_config, complete_fn)
        if model_scores is not None:
            scores = model_scores
            used_mode = MODE_MODEL
    return RubricResult(
        section=kind,
        scores=scores,
        section_ready=_section_ready(scores, cfg),
        generated_at=now_ms,
        mode=used_mode,
    )


def _model_scores(
    project: Project,
    kind: SectionKind,
    cfg: RubricConfig,
    provider_config: "llm.ProviderConfig | None",
    complete_fn: "Callable[[llm.ModelRequest, llm.ProviderConfig], llm.ModelReply] | None",
) -> tuple[CriterionScore, ...] | None:
    config = provider_config or llm.ProviderConfig()
    complete = complete_fn or llm.complete
    criteria = CRITERIA[kind]
    rubric_lines = "\n".join(f"- {c.id}: {c.description}" for c in criteria)
    system = (
        "You grade one section of a student's mobile-app plan against a rubric. "
        "Reply with JSON only, shaped as "
        '{"scores": [{"criterion_id": str, "score": 0|1|2, "evidence": str, "feedback": str}]}. '
        "Evidence must be copied verbatim from the section text or left empty."
    )
    user = (
        f"Section: {kind.label}\nRubric:\n{rubric_lines}\n\n"
        f"Section text:\n{project.sections[kind].text}"
    )
    request = llm.ModelRequest(
        model=config.model,
        messages=(llm.ModelMessage("system", system), llm.ModelMessage("user", user)),
        temperature=_GRADING_TEMPERATURE,
    )
    try:
        reply = complete(request, config)
        parsed = json.loads(reply.content)
        by_id = {s["criterion_id"]: s for s in parsed["scores"]}
        text = project.sections[kind].text
        scores = []
        for criterion in criteria:
            entry = by_id[criterion.id]
            score = int(entry["score"])
            if score not in (0, 1, 2):
                raise ValueError(f"score out of range for {criterion.id}")
            evidence = str(entry.get("evidence", ""))
            if score == 0 or evidence not in text:
                evidence = ""
            feedback = str(entry.get("feedback", "")) or _FEEDBACK[criterion.id]
            if score >= 2:
                feedback = str(entry.get("feedback", ""))
            scores.append(CriterionScore(criterion.id, score, evidence, feedback))
        return tuple(scores)
    except (PlannerError, ValueError, KeyError, TypeError) as exc:
        log.warning("model-graded rubric unavailable for %s (%s); using heuristic scores",
                    kind.value, exc)
        return None


def feedback_messages(result: RubricResult) -> list[str]:
    """Formative messages: one lead encouragement (if anything scored), then gaps."""
    messages: list[str] = []
    label = result.section.label.lower()
    gaps = [s.feedback for s in result.scores if s.score < 2]
    if any(s.score >= 1 for s in result.scores):
        if not gaps:
            messages.append(
                f"Excellent — your {label} section covers everything we look for!"
            )
        else:
            messages.append(
                f"Good progress on your {label} section — a few ideas to make it stronger:"
            )
    messages.extend(gaps)
    return messages


def project_readiness(project: Project, *, catalog: Catalog | None = None) -> Readiness:
    """Export gate: every section must pass the heuristic rubric."""
    catalog = catalog or default_catalog()
    per_section = {
        kind: evaluate_section(project, kind, catalog=catalog).section_ready
        for kind in CHAT_SECTIONS
    }
    return Readiness(ready=all(per_section.values()), per_section=per_section)


def user_spans(text: str, cfg: RubricConfig) -> list[str]:
    """Distinct user-role mentions in order of first appearance (for brief export)."""
    matches = find_matches(text, cfg.lexicon("user_roles") + cfg.lexicon("generic_users"))
    return _dedupe_spans(matches)


def context_spans(text: str, cfg: RubricConfig) -> list[str]:
    """Distinct time/place cues in order of first appearance (for brief export)."""
    matches = find_matches(text, cfg.lexicon("time_cues") + cfg.lexicon("place_cues"))
    matches.sort(key=lambda m: m.start)
    return _dedupe_spans(matches)


def _dedupe_spans(matches: list[_Match]) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for m in matches:
        if m.entry not in seen:
            seen.add(m.entry)
            out.append(m.span)
    return out
