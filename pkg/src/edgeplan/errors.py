"""Exception hierarchy shared across the package."""


class EdgeplanError(Exception):
    """Base class for all domain errors."""


class UnknownType(EdgeplanError):
    pass


class UnbalancedSequence(EdgeplanError):
    pass


class DimensionMismatch(EdgeplanError):
    pass


class DisconnectedTopology(EdgeplanError):
    pass


class ZeroAggregateArrival(EdgeplanError):
    pass


class InfeasibleDeployment(EdgeplanError):
    pass


class ResourceExhausted(EdgeplanError):
    pass


class InfeasibleScenario(EdgeplanError):
    pass


class SpaceTooLarge(EdgeplanError):
    pass


class GenerationFailed(EdgeplanError):
    pass


class FormatError(EdgeplanError):
    """Malformed or unrecognized input file."""
