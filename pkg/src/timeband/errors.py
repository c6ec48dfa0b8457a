"""Exception types shared across the package, with CLI/service exit codes."""


class TimebandError(Exception):
    """Base class for pipeline-level failures."""

    exit_code = 5


class ConfigError(TimebandError):
    """Invalid configuration or parameters."""

    exit_code = 1


class InconclusiveSymmetrizerError(TimebandError):
    """Symmetrizer residual fell in the inconclusive band between the
    existence and non-existence thresholds."""

    exit_code = 2

    def __init__(self, residual, lo, hi):
        super().__init__(
            f"symmetrizer solve inconclusive: normalized residual {residual:.3e} "
            f"lies between {lo:.0e} (exists) and {hi:.0e} (does not exist)"
        )
        self.residual = residual


class QuadratureError(TimebandError):
    """Quadrature rule construction or degree check failed."""

    exit_code = 3


class PositivityLossError(TimebandError):
    """Squared-norm matrix lost positive definiteness during recursion."""

    exit_code = 4

    def __init__(self, index, min_eigenvalue):
        super().__init__(
            f"squared-norm matrix at index {index} is numerically singular "
            f"(min eigenvalue {min_eigenvalue:.3e}); reduce the sequence length"
        )
        self.index = index
        self.min_eigenvalue = min_eigenvalue
