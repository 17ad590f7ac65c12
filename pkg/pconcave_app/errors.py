"""Exception hierarchy shared by the library, the experiment runners and the CLI."""

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3


class PConcaveError(Exception):
    """Base class for every error raised by pconcave_app."""


class ArgumentError(PConcaveError, ValueError):
    """An argument is outside the documented domain of an operation."""


class ResolutionError(PConcaveError):
    """The grid spacing is too coarse for the body being discretized."""


class SolverError(PConcaveError):
    """An iterative solve stopped before reaching its residual threshold."""

    def __init__(self, message: str, residual: float, iterations: int) -> None:
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations


class ConfigError(PConcaveError):
    """An experiment or solver configuration is invalid or references missing files."""


class UsageError(PConcaveError):
    """The command line is malformed (unknown subcommand, missing operand, bad option value)."""


class InternalError(PConcaveError):
    """An internal consistency check failed (for example a mask mismatch)."""
