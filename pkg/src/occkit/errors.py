"""Exception types shared across the package."""

__all__ = ["ParameterError", "ResourceLimitError"]


class ParameterError(ValueError):
    """A parameter is outside its documented domain.

    The message names the violated precondition so CLI callers can
    surface it directly.
    """


class ResourceLimitError(RuntimeError):
    """An exact computation would exceed the configured resource budget."""
