"""Exception hierarchy for the blockshelf engine.

Every engine error carries a stable kebab-case ``code`` so the CLI and the
HTTP service can report machine-parsable diagnostics without string-matching
exception messages.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine-level failures."""

    code = "engine-error"

    def __init__(self, message: str, *, subject: str | None = None):
        super().__init__(message)
        self.message = message
        self.subject = subject


class UnknownBlock(EngineError):
    code = "unknown-block"


class UnknownShelf(EngineError):
    code = "unknown-shelf"


class SlotOccupied(EngineError):
    code = "slot-occupied"


class WouldCreateCycle(EngineError):
    code = "would-create-cycle"


class ChildNotTopLevel(EngineError):
    code = "child-not-top-level"


class AlreadyTopLevel(EngineError):
    code = "already-top-level"


class NotTopLevel(EngineError):
    code = "not-top-level"


class CollapseOnNestedBlock(EngineError):
    code = "collapse-on-nested"


class AlreadyShelved(EngineError):
    code = "already-shelved"


class NotAMember(EngineError):
    code = "not-a-member"


class EmptyName(EngineError):
    code = "empty-name"


class AmbiguousShelf(EngineError):
    code = "ambiguous-shelf"


class UnsupportedVersion(EngineError):
    code = "unsupported-version"


class MalformedDocument(EngineError):
    code = "malformed-document"


class InvalidWorkspace(EngineError):
    code = "invalid-workspace"


class UnknownBlockType(EngineError):
    code = "unknown-block-type"


class EmptyQuery(EngineError):
    code = "empty-query"


class EmptyCorpus(EngineError):
    code = "empty-corpus"


class ParseError(EngineError):
    """Rejection of an input document, with the offending position.

    ``code`` varies per failure ("malformed-xml", "duplicate-id", ...);
    ``line``/``column`` are 1-based and point inside the input.
    """

    def __init__(self, message: str, *, line: int, column: int, code: str):
        super().__init__(message)
        self.line = line
        self.column = column
        self.code = code

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.code}: {self.message}"
