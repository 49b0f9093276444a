"""Exception hierarchy shared across the toolkit."""


class LexshiftError(Exception):
    """Base class for all toolkit errors."""


class CorpusFormatError(LexshiftError):
    """Unreadable corpus file or broken container-level structure."""


class NormsError(LexshiftError):
    """Affect-norms file violates its contract (duplicates, range, columns)."""


class LexiconError(LexshiftError):
    """Theme dictionary or intensifier set violates its contract."""


class ProviderError(LexshiftError):
    """Embedding provider failed after the configured retries."""


class ZeroNormVectorError(LexshiftError):
    """An embedding vector has zero norm; names the offending sentence."""


class SingularDesignError(LexshiftError):
    """Regression design matrix is rank-deficient."""

    def __init__(self, message: str, condition_number: float):
        super().__init__(message)
        self.condition_number = condition_number


class DegenerateDesignError(LexshiftError):
    """A leverage of 1 makes the HC3 weight undefined."""


class NonStationaryError(LexshiftError):
    """AR(1) coefficient estimate left the stationary region (|rho| >= 1)."""


class InsufficientDataError(LexshiftError):
    """Too few observations for the requested fit."""


class ConfigError(LexshiftError):
    """Analysis configuration failed validation."""
