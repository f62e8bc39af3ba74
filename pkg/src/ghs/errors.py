"""Exception hierarchy shared across the package."""


class GhsError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(GhsError, ValueError):
    """Inputs have incompatible or invalid dimensions."""


class ParameterError(GhsError, ValueError):
    """A distribution or configuration parameter is out of range."""


class NumericalError(GhsError, RuntimeError):
    """A numerical operation degenerated (failed factorization, non-PD matrix).

    Carries optional sweep/column context so sampler failures can be located.
    """

    def __init__(self, message, sweep=None, column=None, dataset=None):
        parts = [message]
        if sweep is not None:
            parts.append(f"sweep={sweep}")
        if column is not None:
            parts.append(f"column={column}")
        if dataset is not None:
            parts.append(f"dataset={dataset}")
        super().__init__(" ".join(parts))
        self.sweep = sweep
        self.column = column
        self.dataset = dataset


class ConfigError(GhsError, ValueError):
    """Invalid experiment or CLI configuration."""


class ArchiveFormatError(GhsError, ValueError):
    """Chain archive has an unrecognized magic tag or header."""


class ArchiveCorruptionError(GhsError, ValueError):
    """Chain archive failed checksum or length validation."""
