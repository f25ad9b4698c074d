"""Exception hierarchy shared across the package."""


class RewalkError(Exception):
    """Base class for all package-specific errors."""


class NodeNotFound(RewalkError):
    """A node id is not present in the backing graph."""


class InvalidPair(RewalkError):
    """An operation on a node pair received identical endpoints."""


class EdgeAbsent(RewalkError):
    """The requested edge does not exist in the relevant (overlay) graph."""


class DecisionConflict(RewalkError):
    """A ledger mutation would flip or contradict an earlier decision."""


class ProvenanceViolation(RewalkError):
    """Degree knowledge was supplied for a node that was never queried."""


class BudgetExhausted(RewalkError):
    """The configured unique-query budget would be exceeded."""


class CapabilityUnavailable(RewalkError):
    """The interface was configured without the capability (e.g. id-space exposure)."""


class ParseError(RewalkError):
    """Malformed edge-list or sidecar input."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message if line_number is None else f"line {line_number}: {message}")
        self.line_number = line_number


class EmptyGraph(RewalkError):
    """Ingestion produced a graph with no nodes."""


class IsolatedNode(RewalkError):
    """The walk reached a node with no (overlay) neighbors."""


class ConvergenceTimeout(RewalkError):
    """The convergence monitor did not fire within the step cap."""


class CoverageTimeout(RewalkError):
    """Full node coverage was not reached within the step cap."""


class Disconnected(RewalkError):
    """The graph is not connected, so the requested spectral quantity is undefined."""


class TooLarge(RewalkError):
    """The graph exceeds the size bound of an exhaustive or dense computation."""


class ComputeBudget(RewalkError):
    """The requested horizon exceeds the matrix-power iteration budget."""


class DomainError(RewalkError):
    """A numeric argument lies outside the operation's domain."""


class SampleTooLarge(RewalkError):
    """A without-replacement sample size exceeds the population size."""


class EmptySample(RewalkError):
    """An estimator was invoked on an empty sample set."""


class AttributeMissing(RewalkError):
    """A sample entry lacks the requested attribute."""


class DegenerateSequence(RewalkError):
    """The diagnostic sequence is too short or has zero variance."""


class InsufficientTrials(RewalkError):
    """Too few Monte Carlo trials were requested for a stable estimate."""
