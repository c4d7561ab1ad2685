"""Shared exception types."""


class PartitionError(ValueError):
    """Invalid register partition (bad pairing, overlapping index sets, ...)."""


class ResourceLimitError(RuntimeError):
    """A requested computation would exceed a configured resource cap."""


class ConfigError(ValueError):
    """Bad run configuration; carries the offending file line when known."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = path if line is None else f"{path}:{line}"
            prefix += ": "
        super().__init__(prefix + message)
