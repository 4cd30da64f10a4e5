class InvalidInputError(ValueError):
    """Arguments violate an operation's preconditions."""


class ResourceError(RuntimeError):
    """An instance exceeds the configured size budget."""
