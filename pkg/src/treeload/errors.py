"""Exception types shared across the package."""


class TreeloadError(Exception):
    """Base class; lets callers catch everything the package raises on purpose."""


class ParameterError(TreeloadError, ValueError):
    """A value violates a documented precondition (range, shape, structure)."""


class GenerationError(TreeloadError, RuntimeError):
    """Random network generation exhausted its retry budget."""


class UnreachableNodeError(TreeloadError, ValueError):
    """The master cannot reach every server in the network graph."""

    def __init__(self, unreachable):
        self.unreachable = tuple(sorted(unreachable))
        super().__init__(f"master cannot reach nodes {list(self.unreachable)}")


class InfeasibleError(TreeloadError, RuntimeError):
    """No allocation satisfies the constraints (e.g. every node forced to zero)."""


class ScheduleError(TreeloadError, ValueError):
    """A transmission schedule does not cover the tree it is used with."""


class ScenarioError(TreeloadError, ValueError):
    """A scenario document failed validation; lists the offending fields."""

    def __init__(self, problems):
        self.problems = tuple(problems)
        super().__init__("invalid scenario: " + "; ".join(self.problems))
