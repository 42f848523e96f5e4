"""Error types shared by the library and the command line front end."""


class DataError(ValueError):
    """Malformed input data: files, graphs, weights, index sets."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (no root in bracket, no convergence)."""
