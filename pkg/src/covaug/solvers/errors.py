class SolverError(RuntimeError):
    """A discretized problem could not be solved."""


class CoefficientError(SolverError, ValueError):
    """A coefficient violates the positivity the scheme relies on."""


class CFLError(SolverError, ValueError):
    """The explicit time step exceeds the stability limit."""
