"""Exception and warning types raised across the package."""


class LapsparseError(Exception):
    """Base class for all lapsparse errors."""


class SelfLoopError(LapsparseError):
    """An edge (i, i) was supplied; graphs here have no self-loops."""


class NegativeWeightError(LapsparseError):
    """An edge weight was negative or non-finite."""


class DuplicateEdgeError(LapsparseError):
    """The same undirected edge was supplied twice."""


class IndexOutOfRangeError(LapsparseError):
    """A node index fell outside [0, n_nodes)."""


class EdgeNotFoundError(LapsparseError):
    """The requested edge does not exist in the graph."""


class SizeCapExceededError(LapsparseError):
    """A dense operation was requested above its configured size cap."""


class NoConvergenceError(LapsparseError):
    """The iterative eigensolver hit its iteration cap before converging."""


class DimensionMismatchError(LapsparseError):
    """Vector or matrix dimensions do not agree."""


class InfeasibleBoundsError(LapsparseError):
    """Degree bounds cannot be satisfied on this graph."""


class BudgetExceedsEdgesError(LapsparseError):
    """More edge removals were requested than edges exist."""


class ZeroWeightEdgeError(LapsparseError):
    """A zero-weight edge makes reciprocal path lengths undefined."""


class ParseError(LapsparseError):
    """A graph file could not be parsed; the message names the line."""


class IoError(LapsparseError):
    """A graph file could not be read or written."""


class DegenerateFeaturesWarning(UserWarning):
    """All feature rows are identical; every kernel weight equals 1."""
