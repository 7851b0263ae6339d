"""Shared error base for the planner domain modules."""

from __future__ import annotations


class PlannerError(Exception):
    """Base class for domain errors.

    ``code`` mirrors the concrete class name and is what the HTTP layer and
    the CLI put on the wire; ``detail`` carries structured context.
    """

    def __init__(self, message: str, **detail: object) -> None:
        super().__init__(message)
        self.detail: dict[str, object] = dict(detail)

    @property
    def code(self) -> str:
        return type(self).__name__
