"""Exception hierarchy shared by the package and the command-line front end."""


class PCHAError(Exception):
    """Base class for all errors raised by :mod:`pcha`."""


class DataError(PCHAError, ValueError):
    """Malformed input data, dimension mismatch or bad file contents."""


class ModelFileError(DataError):
    """A serialized model is corrupt, truncated or has the wrong version."""


class NumericError(PCHAError, ArithmeticError):
    """A numerical routine failed (non-symmetric input, overflow, no convergence)."""


class InfeasibleError(NumericError):
    """No tuning cell is feasible, e.g. every requested rank exceeds a fold rank."""
