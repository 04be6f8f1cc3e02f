"""Exception types shared across the package."""


class TeachSimError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(TeachSimError):
    """Non-finite values, shape/dimension mismatches, or out-of-range arguments."""


class WorkspaceError(InvalidInputError):
    """A state lies outside the active workspace."""


class RankDeficiencyError(TeachSimError):
    """The unregularized normal equations are singular."""


class GenerationExhaustedError(TeachSimError):
    """Query-state generation could not find an acceptable candidate."""


class ProtocolOrderError(TeachSimError):
    """A session operation was attempted in the wrong status."""


class UnknownSkillError(TeachSimError):
    """A skill id does not resolve to a registered skill."""


class UnsupportedVersionError(TeachSimError):
    """A session log uses a format version this build cannot read."""


class LogParseError(TeachSimError):
    """A session log file is malformed.

    Carries ``byte_offset`` when the underlying JSON decoder reports one.
    """

    def __init__(self, message: str, byte_offset: int | None = None):
        super().__init__(message)
        self.byte_offset = byte_offset
