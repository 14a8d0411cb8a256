"""Exception types shared across the package.

Each class carries the process exit code the command-line front end maps
it to (0 success, 2 config, 3 domain, 4 numerical, 5 invariant failure).
"""


class StsmError(Exception):
    """Base class for all package-specific errors."""

    exit_code = 1


class ConfigError(StsmError):
    """Invalid, unknown, or inconsistent run configuration."""

    exit_code = 2


class DomainError(StsmError):
    """Physical-domain violation: evanescent wave, out-of-band wavelength.

    ``leg`` identifies the offending field (pump/signal/idler) and
    ``detail`` holds the offending values, for grid-construction debugging.
    """

    exit_code = 3

    def __init__(self, message, leg=None, **detail):
        self.leg = leg
        self.detail = detail
        if leg is not None:
            message = f"{message} [leg={leg}"
            if detail:
                message += ", " + ", ".join(f"{k}={v!r}" for k, v in detail.items())
            message += "]"
        super().__init__(message)


class NumericalError(StsmError):
    """Solver non-convergence or quadrature failure."""

    exit_code = 4


class InvariantError(StsmError):
    """A built-in consistency check failed on the produced result."""

    exit_code = 5
