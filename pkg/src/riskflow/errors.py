"""Exceptions and warning categories shared across the engine."""

from __future__ import annotations


class RiskflowError(Exception):
    """Base class for all domain errors raised by this package."""


class DimensionError(RiskflowError, ValueError):
    """A vector's length does not match the perspective schema."""


class DocumentSyntaxError(RiskflowError):
    """The model document is not well-formed (carries a text position)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class SchemaError(RiskflowError):
    """The document is well-formed but violates the model file schema."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class ValidationError(RiskflowError):
    """A graph failed structural validation; carries the full report."""

    def __init__(self, report):
        self.report = report
        lines = "; ".join(str(issue) for issue in report.errors())
        super().__init__(f"invalid graph: {lines}")


class AbstractionCycleError(RiskflowError):
    """The abstraction subgraph contains a cycle and admits no topological order."""

    def __init__(self, cycle: tuple[str, ...]):
        self.cycle = cycle
        super().__init__("abstraction cycle: " + " -> ".join(cycle))


class IterationLimitExceeded(RiskflowError):
    """The dependency fixpoint failed to settle within its relaxation budget.

    For importance weights inside [0, 1] the fixpoint provably terminates,
    so hitting this means an out-of-range weight slipped past validation.
    """


class GraphTooLargeError(RiskflowError):
    """The brute-force oracle refuses graphs above its node guard."""


class UnknownReferenceError(RiskflowError):
    """A node id, edge reference, or perspective name does not exist."""


class ActionWouldInvalidateError(RiskflowError):
    """Applying a mitigation action would leave the graph invalid."""

    def __init__(self, report):
        self.report = report
        lines = "; ".join(str(issue) for issue in report.errors())
        super().__init__(f"mitigation would invalidate the graph: {lines}")


class StorageError(RiskflowError):
    """A snapshot store is corrupt or could not be read/written."""


class SnapshotNotFoundError(RiskflowError):
    """No snapshot with the requested id exists in the store."""


class SchemaMismatchError(RiskflowError):
    """Two results cannot be compared because their perspective lists differ."""


class RiskflowWarning(UserWarning):
    """Base category for non-fatal conditions surfaced during analysis."""


class EmptyLeafSetWarning(RiskflowWarning):
    """No node carries measured risk: propagation will be all-zero."""
