"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: usage problems exit 2,
configuration problems exit 3, anything else exits 4.
"""


class ChronosimError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(ChronosimError, ValueError):
    """Invalid input values, malformed files, or violated preconditions."""


class ConfigError(ChronosimError, ValueError):
    """Inconsistent run configuration (strategy/mapping mismatch, overflow)."""


class InvariantViolation(ChronosimError, RuntimeError):
    """A dispatcher-state invariant was broken (only raised in checked mode)."""
