"""Exception types shared across Harmonator modules."""

from __future__ import annotations


class ConfigError(ValueError):
    """Raised when a run configuration or preset fails parsing or validation."""

    def __init__(self, message: str, *, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class DimensionMismatchError(ValueError):
    """Raised when a state does not match the mode grid it is evolved on."""

    pass


class NumericalAbortError(RuntimeError):
    """Raised when an integration produces an unusable state."""

    def __init__(self, message: str, *, time: float | None = None, index: int | None = None):
        self.time = time
        self.index = index
        super().__init__(message)


class TruncationError(NumericalAbortError):
    """Raised when Fock-space population reaches the truncation edge."""

    pass


class FloquetError(ValueError):
    """Raised when the monodromy is not unitary or its eigenproblem fails."""

    pass


class SpectrumError(ValueError):
    """Raised when two spectra cannot be compared at the requested reference."""

    pass


class ManifestError(ValueError):
    """Raised when a run manifest violates its contract or its recorded hashes."""

    pass
