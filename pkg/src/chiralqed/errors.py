"""Exception hierarchy. Every error carries a machine-readable category string
that the command-line front end maps to a distinct exit code."""

from __future__ import annotations


class ChiralQEDError(Exception):
    """Base class for all toolkit errors."""

    category = "error"


class ConfigError(ChiralQEDError):
    """Malformed or contradictory run configuration (config file or flags)."""

    category = "config"


class ParameterError(ChiralQEDError):
    """Physically invalid or out-of-contract parameter values."""

    category = "params"


class UnsupportedRegimeError(ChiralQEDError):
    """Operation requires the lossless resonant regime (all gamma = delta = 0)."""

    category = "unsupported-regime"


class NoDarkStateError(ChiralQEDError):
    """No cavity dark state exists for the given couplings."""

    category = "no-dark-state"

    def __init__(self, message: str, vanishing: tuple[str, ...] = ()):
        super().__init__(message)
        self.vanishing = vanishing


class DomainError(ChiralQEDError):
    """Input outside the mathematical domain of the requested map."""

    category = "domain"


class InsufficientCountsError(ChiralQEDError):
    """Too few emission events to form an estimate."""

    category = "insufficient-counts"


class IntegrationError(ChiralQEDError):
    """ODE integration failed; carries the last successfully computed state."""

    category = "integration"

    def __init__(self, message: str, last_state=None):
        super().__init__(message)
        self.last_state = last_state


#: exit codes used by the CLI, one per error category
EXIT_CODES = {
    "config": 2,
    "params": 3,
    "domain": 4,
    "no-dark-state": 5,
    "unsupported-regime": 6,
    "insufficient-counts": 7,
    "integration": 8,
    "io": 9,
    "error": 1,
}
