"""Worked demo plans: a lunch planner and an English-translator helper.

Both fixtures are authored to pass every rubric detector, so they exercise the
full pipeline (chat, evaluation, brief export) out of the box. ``seed-demo``
writes them into a store; the tests use them as the ready-plan oracles.
"""

from __future__ import annotations

from . import session
from .plan import SectionKind
from .store import StoredEnvelope

LUNCH_PROJECT_ID = "demo-lunch-planner"
TRANSLATOR_PROJECT_ID = "demo-english-helper"

LUNCH_PLAN = {
    "title": "LunchPal",
    SectionKind.DEFINE: (
        "Students waste time deciding what to eat at school during lunchtime "
        "because menus change daily and nobody can plan ahead."
    ),
    SectionKind.DESIGN: (
        "The app shows the daily lunch menu in a list view. "
        "A button lets students vote for tomorrow's meal, and a notification "
        "reminds them before lunchtime."
    ),
    SectionKind.POSITIVE_IMPACT: (
        "This helps students save time and choose healthier meals every day. "
        "Families can plan lunches together instead of guessing."
    ),
    SectionKind.NEGATIVE_IMPACT: (
        "The app could share private data about students' eating habits. "
        "Notifications during class could become a distraction, and daily streaks "
        "might add screen time."
    ),
}

TRANSLATOR_PLAN = {
    "title": "English Buddy",
    SectionKind.DEFINE: (
        "My mother struggles to learn English because she cannot practice "
        "at home during the evening, and she needs quick translations while "
        "shopping or in conversations."
    ),
    SectionKind.DESIGN: (
        "The app has a translator with a text box and a button, where the mother "
        "can type in their language and press the button to see the "
        "English-translated version. A list of saved phrases lets her practice "
        "English every morning."
    ),
    SectionKind.POSITIVE_IMPACT: (
        "This helps my mother learn English faster and feel more confident "
        "talking with neighbors. It could support other parents learning a new "
        "language too."
    ),
    SectionKind.NEGATIVE_IMPACT: (
        "Saved phrases are private data, so a leak would expose personal "
        "conversations. Relying on the app too much could become a distraction "
        "from real practice, and translations might carry bias."
    ),
}

_DEMOS = (
    (LUNCH_PROJECT_ID, LUNCH_PLAN),
    (TRANSLATOR_PROJECT_ID, TRANSLATOR_PLAN),
)


def seed_demo(ctx: session.AppContext) -> list[StoredEnvelope]:
    """Create (or recreate) both demo projects in the context's store."""
    envelopes = []
    for project_id, plan in _DEMOS:
        original_factory = ctx.id_factory
        ctx.id_factory = lambda pid=project_id: pid
        try:
            session.create_project(ctx, plan["title"])
        finally:
            ctx.id_factory = original_factory
        for kind in (
            SectionKind.DEFINE,
            SectionKind.DESIGN,
            SectionKind.POSITIVE_IMPACT,
            SectionKind.NEGATIVE_IMPACT,
        ):
            envelope = session.edit_section(ctx, project_id, kind, plan[kind])
        envelopes.append(envelope)
    return envelopes
