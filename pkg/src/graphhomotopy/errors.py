"""Exception and warning types shared across the package."""


class GraphHomotopyError(Exception):
    """Base class for all errors raised by this package."""


class NotPositiveDefinite(GraphHomotopyError, ValueError):
    pass


class NotSymmetric(GraphHomotopyError, ValueError):
    pass


class DimensionMismatch(GraphHomotopyError, ValueError):
    pass


class ConvergenceFailure(GraphHomotopyError, RuntimeError):
    pass


class IndexOutOfRange(GraphHomotopyError, IndexError):
    pass


class DegenerateCluster(GraphHomotopyError, ValueError):
    pass


class DegenerateColumn(GraphHomotopyError, ValueError):
    pass


class SingularTransform(GraphHomotopyError, ValueError):
    pass


class PropertyViolation(GraphHomotopyError, AssertionError):
    """A structural guarantee of a model family did not hold."""


class ParseError(GraphHomotopyError, ValueError):
    def __init__(self, message, *, path=None, line=None, column=None):
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}")
        if column is not None:
            loc.append(f"column {column}")
        prefix = ", ".join(loc)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.line = line
        self.column = column


class HeywoodCase(UserWarning):
    """A factor-analysis uniqueness hit the floor."""


class GridExhausted(UserWarning):
    """No tuning value met the StARS instability bound."""


class DegenerateSpectrum(UserWarning):
    """Within-cluster eigenvalues too close to identify eigenvectors."""
