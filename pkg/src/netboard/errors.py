"""Exception types shared across the engine."""


class NetboardError(Exception):
    """Base class for all engine errors."""


class ParseError(NetboardError):
    """Malformed structured text (story files, frame records, configs)."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}" + (
                f", column {column})" if column is not None else ")"
            )
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaError(NetboardError):
    """A document is structurally valid text but has missing or wrongly-typed fields."""


class ReferentialError(NetboardError):
    """Dangling ids, duplicate ids, or cross-references that cannot resolve."""


class RangeError(NetboardError):
    """A numeric value lies outside its documented interval."""


class ScriptConflict(NetboardError):
    """Two mutually exclusive script primitives overlap for one magnet."""


class RateError(NetboardError):
    """A sampling rate is non-positive or otherwise unusable."""


class TimestampError(NetboardError):
    """Frame timestamps are not strictly increasing."""


class AmbiguityError(NetboardError):
    """Two enabled command-set patterns match the same action context."""


class UnknownTarget(NetboardError):
    """A command references a node, link, or magnet the story does not define."""


class IllegalCommand(NetboardError):
    """A command is well-formed but not applicable in the current state."""


class MissingPose(NetboardError):
    """Layout needs a magnet pose that was never observed."""


class BindError(NetboardError):
    """The session transport endpoint could not be bound."""


class StoryError(NetboardError):
    """A story file failed to load or validate at session start."""


class ProtocolError(NetboardError):
    """A malformed or out-of-order message arrived on the session transport."""
