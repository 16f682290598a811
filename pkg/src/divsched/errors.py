"""Exception types raised across the package."""


class DivschedError(Exception):
    """Base class for all package errors."""


class ConfigError(DivschedError, ValueError):
    """A configuration value violates an invariant."""


class DomainError(DivschedError, ValueError):
    """A numeric argument lies outside the domain of a formula."""


class InfeasibleError(DivschedError, ValueError):
    """A request cannot be satisfied under the stated constraints."""


class LimitExceededError(DivschedError, RuntimeError):
    """An exhaustive search would exceed its configured size limit."""
