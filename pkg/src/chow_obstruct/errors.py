"""Exception hierarchy shared by the library and the command line front end."""


class ChowObstructError(Exception):
    """Base class for every error raised by this package."""


class InputError(ChowObstructError, ValueError):
    """Malformed or inconsistent user input (bad polytope, unknown parameter, ...)."""


class ConsistencyError(ChowObstructError, RuntimeError):
    """An internal cross-check failed; the result cannot be trusted."""
