"""Exception types shared by all tetherplan modules.

Every error carries a short machine-readable ``code`` (e.g. ``"ANCHOR_IN_OBSTACLE"``)
so the CLI can map failures to exit codes without string matching.
"""

from __future__ import annotations


class TetherPlanError(Exception):
    """Base class. ``code`` identifies the failure kind."""

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}" if message else code)


class ParseError(TetherPlanError):
    def __init__(self, message: str = ""):
        super().__init__("PARSE_ERROR", message)


class EnvironmentValidationError(TetherPlanError):
    pass


class SignatureError(TetherPlanError):
    pass


class TriangulationError(TetherPlanError):
    pass


class CoverError(TetherPlanError):
    pass


class PlanningError(TetherPlanError):
    pass
