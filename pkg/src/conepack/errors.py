"""Exception hierarchy shared by the solver modules."""


class ConePackError(Exception):
    """Base class for all solver errors."""


class InvalidInstance(ConePackError, ValueError):
    pass


class NegativeMatrixEntry(InvalidInstance):
    pass


class NonPositiveCapacity(InvalidInstance):
    pass


class EmptyRowOrColumn(InvalidInstance):
    pass


class IndexOutOfRange(InvalidInstance):
    pass


class NonPositiveDual(ConePackError, ValueError):
    pass


class ZeroGenerator(ConePackError, ValueError):
    pass


class ZeroLoad(ConePackError):
    """A generator loads no row at all (instance and oracle disagree)."""


class CostMismatch(ConePackError):
    pass


class BoundNotLower(ConePackError):
    pass


class IterationCapExceeded(ConePackError):
    pass


class InfeasibleAfterScaling(ConePackError):
    pass


class BoundBelowRange(ConePackError):
    pass


class NonPositiveLambda(ConePackError, ValueError):
    pass


class NoPositiveCostGenerator(ConePackError):
    pass


class NonCombinatorialOperation(ConePackError, TypeError):
    pass


class Unbounded(ConePackError):
    pass


class NoPositiveCost(ConePackError):
    pass


class TooLarge(ConePackError, ValueError):
    pass


# graph / application errors

class NoPath(ConePackError):
    pass


class NoCycle(ConePackError):
    pass


class Disconnected(ConePackError):
    pass


class InfeasibleNode(ConePackError):
    pass


class CyclicNetwork(ConePackError):
    pass


class RankDeficient(ConePackError):
    pass


class FormatError(ConePackError, ValueError):
    """Malformed instance or graph file."""
