"""App Planner: a guided design-thinking scaffold for student mobile-app ideation."""

from .plan import (
    CHAT_SECTIONS,
    STAGE_COMPLETE,
    Project,
    SectionKind,
    new_project,
    update_section,
    validate_structure,
)
from .scaffold import default_catalog, load_catalog, next_guidance, preset_catalog, rule_response
from .rubric import evaluate_section, feedback_messages, project_readiness
from .brief import build_brief, extract_features, render_instruction
from .provider import ModelReply, ModelRequest, ProviderConfig, complete, mock_complete
from .store import ProjectStore, StoredEnvelope
from .study import assign_conditions, compute_metrics

__version__ = "0.1.0"

__all__ = [
    "CHAT_SECTIONS",
    "STAGE_COMPLETE",
    "Project",
    "SectionKind",
    "new_project",
    "update_section",
    "validate_structure",
    "default_catalog",
    "load_catalog",
    "next_guidance",
    "preset_catalog",
    "rule_response",
    "evaluate_section",
    "feedback_messages",
    "project_readiness",
    "build_brief",
    "extract_features",
    "render_instruction",
    "ModelReply",
    "ModelRequest",
    "ProviderConfig",
    "complete",
    "mock_complete",
    "ProjectStore",
    "StoredEnvelope",
    "assign_conditions",
    "compute_metrics",
    "__version__",
]
