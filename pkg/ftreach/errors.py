"""Exceptions and verdicts shared by every ftreach module."""

from typing import Optional


class FtreachError(Exception):
    """Base class for every error ftreach raises."""


class InputError(FtreachError):
    """The caller supplied a graph, tree or arc set that cannot be used."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphFormatError(InputError):
    """Malformed or invalid ``.fg`` flow-graph input."""


class TreeFormatError(InputError):
    """Malformed ``.tree`` input, or a tree that does not span the graph."""


class SizeGuardError(InputError):
    """An exhaustive oracle was asked to work on an instance that is too large."""


class ConsistencyError(FtreachError):
    """An internal invariant failed; the inputs were valid, the code was not."""


class NoQualifyingArc(ConsistencyError):
    """No arc satisfies the constraint of the case that applies to ``vertex``."""

    def __init__(self, vertex: int, case: str):
        self.vertex = vertex
        self.case = case
        super().__init__(f"no qualifying arc enters vertex {vertex} (case {case})")


class ChoiceUnavailable(FtreachError):
    """A restricted divergent-tree build has no admissible arc entering ``vertex``."""

    def __init__(self, vertex: int):
        self.vertex = vertex
        super().__init__(f"no admissible arc pair enters vertex {vertex}")


class Verdict:
    """Outcome of a checker: truthy when the check passed.

    On failure ``vertex`` is the first offending vertex and ``reason`` names the
    clause that failed.
    """

    __slots__ = ("ok", "vertex", "reason")

    def __init__(self, ok: bool, vertex: Optional[int] = None, reason: str = ""):
        self.ok = ok
        self.vertex = vertex
        self.reason = reason

    @classmethod
    def passed(cls) -> "Verdict":
        return cls(True)

    @classmethod
    def failed(cls, vertex: Optional[int], reason: str) -> "Verdict":
        return cls(False, vertex, reason)

    def __bool__(self) -> bool:
        return self.ok

    def __repr__(self) -> str:
        if self.ok:
            return "Verdict(ok)"
        return f"Verdict(failed at {self.vertex}: {self.reason})"
