"""Exception types raised by edgerecon."""


class ParameterError(ValueError):
    """An argument is outside its valid domain (e.g. p not in (0, 1])."""


class CapacityError(ValueError):
    """A request exceeds what the structure can hold (too many edges, 2^M too big)."""


class GraphParseError(ValueError):
    """Malformed edge-list input."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class PriorConstructionError(ValueError):
    """A prior cannot be built from the given sample (infeasible constraints)."""


class EstimationError(ArithmeticError):
    """A posterior has no mass for some observed item."""


class AlignmentError(ValueError):
    """Truth and estimate sequences do not line up."""
