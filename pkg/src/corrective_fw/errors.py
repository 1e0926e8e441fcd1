"""Exception types shared across the toolkit."""


class NonFiniteInputError(ValueError):
    """An input array contains NaN or infinity."""


class DimensionMismatchError(ValueError):
    """Array shapes are inconsistent with the operation's contract."""


class IterationLimitError(RuntimeError):
    """An iterative routine hit its iteration cap before finishing."""


class WeightValidationError(ValueError):
    """Proposed active-set weights violate the simplex constraints."""


class EmptyActiveSetError(RuntimeError):
    """Operation requires a non-empty active set."""


class SingletonActiveSetError(RuntimeError):
    """Operation requires at least two atoms in the active set."""


class InvalidKError(ValueError):
    """Sparsity level k is outside [1, n]."""


class NotSquareError(ValueError):
    """A square matrix was expected."""


class InfeasibleStartError(ValueError):
    """The starting point is not feasible for the given domain."""


class EmptyDatasetError(ValueError):
    """A dataset file parsed to zero samples."""


class TraceParseError(ValueError):
    """A trace or dataset file is malformed.

    Carries the offending path and 1-based line number when known.
    """

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc = f"{path}:" if line is None else f"{path}:{line}:"
        super().__init__(f"{loc} {message}" if loc else message)
        self.path = path
        self.line = line
