"""Exception types shared across the package."""


class IncentivesError(Exception):
    """Base class for all package-specific errors."""


class InstanceError(IncentivesError, ValueError):
    """Malformed population data (files or in-memory construction)."""


class ConfigError(IncentivesError, ValueError):
    """Invalid generator or oracle configuration."""


class ResourceCapError(IncentivesError, RuntimeError):
    """An exact computation would exceed its configured size cap."""
