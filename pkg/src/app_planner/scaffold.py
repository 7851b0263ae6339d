"""Stage guidance and the rule-based quick-reply layer.

The catalog (preset bubbles, guidance cards, rubric lexicons) ships as an
editable YAML file and is loaded once at startup. Everything in this module is
pure and never touches the model provider: preset clicks are answered from
templates alone.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .errors import PlannerError
from .plan import CHAT_SECTIONS, STAGE_COMPLETE, Project, SectionKind

_ALLOWED_PLACEHOLDERS = {"title", "define_text"}
_PLACEHOLDER = re.compile(r"\{(\w+)\}")

# Caps applied when interpolating project fields into templates, so a huge
# Define box cannot balloon a rule response.
_TITLE_SLOT_MAX = 80
_DEFINE_SLOT_MAX = 200

_REQUIRED_LEXICONS = (
    "user_roles",
    "generic_users",
    "time_cues",
    "place_cues",
    "problem_words",
    "benefit_words",
    "risk_words",
    "components",
    "feature_verbs",
)


class CatalogError(PlannerError):
    """Malformed catalog file; aborts startup. Carries a line number when known."""


class NoPresetsForTitle(PlannerError):
    pass


class UnknownPreset(PlannerError):
    pass


@dataclass(frozen=True)
class PresetQuestion:
    id: str
    section: SectionKind
    label: str
    response_template: str


@dataclass(frozen=True)
class GuidanceCard:
    section: SectionKind
    prompt_text: str
    example_text: str
    review: bool = False


@dataclass(frozen=True)
class RubricConfig:
    min_score: int
    min_mean: float
    lexicons: dict[str, tuple[str, ...]]

    def lexicon(self, name: str) -> tuple[str, ...]:
        return self.lexicons[name]


@dataclass(frozen=True)
class Catalog:
    presets: dict[str, PresetQuestion]
    presets_by_section: dict[SectionKind, tuple[PresetQuestion, ...]]
    guidance: dict[SectionKind, GuidanceCard]
    rubric: RubricConfig


class _LineLoader(yaml.SafeLoader):
    """SafeLoader that records the source line of every mapping it builds."""

    def construct_mapping(self, node, deep=False):  # type: ignore[override]
        mapping = super().construct_mapping(node, deep=deep)
        mapping["__line__"] = node.start_mark.line + 1
        return mapping


def _fail(message: str, line: int | None = None) -> CatalogError:
    where = f" (line {line})" if line else ""
    return CatalogError(f"catalog error{where}: {message}", line=line)


def _entry_str(entry: dict[str, Any], key: str, context: str) -> str:
    value = entry.get(key)
    if not isinstance(value, str) or not value.strip():
        raise _fail(f"{context} is missing a non-empty '{key}'", entry.get("__line__"))
    return value.strip()


def _entry_section(entry: dict[str, Any], context: str) -> SectionKind:
    raw = _entry_str(entry, "section", context)
    try:
        kind = SectionKind(raw)
    except ValueError:
        raise _fail(f"{context} has unknown section '{raw}'", entry.get("__line__")) from None
    if kind == SectionKind.TITLE:
        raise _fail(f"{context} may not target the title box", entry.get("__line__"))
    return kind


def _check_template(template: str, line: int | None, context: str) -> None:
    unknown = sorted(set(_PLACEHOLDER.findall(template)) - _ALLOWED_PLACEHOLDERS)
    if unknown:
        raise _fail(f"{context} uses unknown placeholder(s) {unknown}", line)
    if "?" not in template:
        raise _fail(f"{context} must ask the student a question", line)
    if "example" not in template.lower():
        raise _fail(f"{context} must include a concrete example", line)


def load_catalog(path: str | Path | None = None) -> Catalog:
    """Parse and validate a catalog file; raises CatalogError on any defect.

    YAML syntax errors and schema violations both surface with the offending
    line number so an edited file can be fixed quickly.
    """
    if path is None:
        text = resources.files("app_planner.data").joinpath("catalog.yaml").read_text("utf-8")
        source = "built-in catalog"
    else:
        text = Path(path).read_text("utf-8")
        source = str(path)
    try:
        doc = yaml.load(text, Loader=_LineLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark else None
        raise _fail(f"{source} is not valid YAML: {getattr(exc, 'problem', exc)}", line) from exc
    if not isinstance(doc, dict):
        raise _fail(f"{source} must be a mapping with presets/guidance/rubric keys")
    return _build_catalog(doc)


def _build_catalog(doc: dict[str, Any]) -> Catalog:
    presets: dict[str, PresetQuestion] = {}
    by_section: dict[SectionKind, list[PresetQuestion]] = {k: [] for k in CHAT_SECTIONS}
    raw_presets = doc.get("presets")
    if not isinstance(raw_presets, list) or not raw_presets:
        raise _fail("'presets' must be a non-empty list")
    for entry in raw_presets:
        pid = _entry_str(entry, "id", "preset")
        line = entry.get("__line__")
        if pid in presets:
            raise _fail(f"duplicate preset id '{pid}'", line)
        section = _entry_section(entry, f"preset '{pid}'")
        label = _entry_str(entry, "label", f"preset '{pid}'")
        template = _entry_str(entry, "response_template", f"preset '{pid}'")
        _check_template(template, line, f"preset '{pid}' response")
        preset = PresetQuestion(id=pid, section=section, label=label, response_template=template)
        presets[pid] = preset
        by_section[section].append(preset)

    guidance: dict[SectionKind, GuidanceCard] = {}
    raw_guidance = doc.get("guidance")
    if not isinstance(raw_guidance, list) or not raw_guidance:
        raise _fail("'guidance' must be a non-empty list")
    for entry in raw_guidance:
        section = _entry_section(entry, "guidance card")
        if section in guidance:
            raise _fail(f"duplicate guidance card for '{section.value}'", entry.get("__line__"))
        guidance[section] = GuidanceCard(
            section=section,
            prompt_text=_entry_str(entry, "prompt_text", f"guidance for '{section.value}'"),
            example_text=_entry_str(entry, "example_text", f"guidance for '{section.value}'"),
        )

    for kind in CHAT_SECTIONS:
        if len(by_section[kind]) < 3:
            raise _fail(f"section '{kind.value}' needs at least 3 presets")
        if kind not in guidance:
            raise _fail(f"section '{kind.value}' is missing its guidance card")

    rubric = _build_rubric(doc.get("rubric"))
    return Catalog(
        presets=presets,
        presets_by_section={k: tuple(v) for k, v in by_section.items()},
        guidance=guidance,
        rubric=rubric,
    )


def _build_rubric(raw: Any) -> RubricConfig:
    if not isinstance(raw, dict):
        raise _fail("'rubric' section is missing")
    thresholds = raw.get("thresholds")
    if not isinstance(thresholds, dict):
        raise _fail("'rubric.thresholds' is missing", raw.get("__line__"))
    try:
        min_score = int(thresholds["min_score"])
        min_mean = float(thresholds["min_mean"])
    except (KeyError, TypeError, ValueError):
        raise _fail("'rubric.thresholds' needs numeric min_score and min_mean",
                    thresholds.get("__line__")) from None
    raw_lex = raw.get("lexicons")
    if not isinstance(raw_lex, dict):
        raise _fail("'rubric.lexicons' is missing", raw.get("__line__"))
    lexicons: dict[str, tuple[str, ...]] = {}
    for name in _REQUIRED_LEXICONS:
        entries = raw_lex.get(name)
        if not isinstance(entries, list) or not entries:
            raise _fail(f"lexicon '{name}' must be a non-empty list", raw_lex.get("__line__"))
        cleaned = tuple(str(e).strip().lower() for e in entries if str(e).strip())
        if not cleaned:
            raise _fail(f"lexicon '{name}' has no usable entries", raw_lex.get("__line__"))
        lexicons[name] = cleaned
    return RubricConfig(min_score=min_score, min_mean=min_mean, lexicons=lexicons)


@lru_cache(maxsize=1)
def default_catalog() -> Catalog:
    """The catalog packaged with the application."""
    return load_catalog(None)


def preset_catalog(kind: SectionKind, catalog: Catalog | None = None) -> list[PresetQuestion]:
    """Fixed preset list for one section, stable order."""
    if kind == SectionKind.TITLE:
        raise NoPresetsForTitle("the title box has no preset questions")
    catalog = catalog or default_catalog()
    return list(catalog.presets_by_section[kind])


def _fill_slot(value: str, fallback: str, limit: int) -> str:
    cleaned = " ".join(value.split())
    if not cleaned:
        return fallback
    if len(cleaned) > limit:
        cleaned = cleaned[:limit].rsplit(" ", 1)[0] or cleaned[:limit]
    return cleaned


def rule_response(question_id: str, project: Project, catalog: Catalog | None = None) -> str:
    """Deterministic canned reply for a preset click. Never calls the provider."""
    catalog = catalog or default_catalog()
    preset = catalog.presets.get(question_id)
    if preset is None:
        raise UnknownPreset(f"no preset with id '{question_id}'", question_id=question_id)
    title = _fill_slot(project.title, "your app", _TITLE_SLOT_MAX)
    define_text = _fill_slot(
        project.sections[SectionKind.DEFINE].text, "your idea so far", _DEFINE_SLOT_MAX
    )
    return preset.response_template.replace("{title}", title).replace("{define_text}", define_text)


def next_guidance(project: Project, catalog: Catalog | None = None) -> GuidanceCard:
    """Card for the current stage; a finished plan gets the last card in review mode."""
    catalog = catalog or default_catalog()
    cursor = project.stage_cursor
    if cursor == STAGE_COMPLETE:
        return replace(catalog.guidance[SectionKind.NEGATIVE_IMPACT], review=True)
    return catalog.guidance[SectionKind(cursor)]
