"""Exception hierarchy shared by the solver, the oracles and the CLI."""


class HintsError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ValidationError(HintsError, ValueError):
    """Malformed tree, instance, label map or constraint file."""

    exit_code = 2

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])


class TreeError(ValidationError):
    """Invalid label tree (cycle, several roots, negative weight, ...)."""


class InfeasibleError(HintsError):
    """A labeling violates hard constraints, or no feasible labeling exists."""

    exit_code = 3


class NoFiniteCut(InfeasibleError):
    """Every s-t cut of a flow network contains an infinite arc."""


class NonSubmodularError(HintsError):
    """A binary move produced a pairwise term that cannot be cut exactly."""

    exit_code = 3


class BudgetExceeded(HintsError):
    """An exhaustive enumeration would exceed its configured budget."""

    exit_code = 4
