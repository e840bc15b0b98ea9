"""Error types shared across the library and mapped to CLI exit codes."""


class ConfigurationError(ValueError):
    """Invalid input or configuration (bad flag value, dimension mismatch,
    out-of-range index, malformed config file). CLI exit code 2."""


class SolverDivergedError(RuntimeError):
    """A solver produced a non-finite iterate. Usually a step size or
    Lipschitz constant misconfiguration. CLI exit code 1."""
