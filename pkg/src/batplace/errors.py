"""Exception types shared across the package."""


class CaseFormatError(ValueError):
    """A case file is malformed; the message names the offending field."""


class TopologyError(ValueError):
    """An operation was asked to run on a topology it does not support."""


class PreconditionViolated(ValueError):
    """A closed-form result was requested outside its validity conditions."""


class BalanceOutOfRange(RuntimeError):
    """The balancing control at the adjustment period left its admissible
    interval, which means the supplied maxflow table is inconsistent."""


class InfeasibleProblem(RuntimeError):
    """The underlying linear program has no feasible point."""
