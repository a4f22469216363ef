"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Malformed or out-of-contract input (shapes, indices, parameters)."""


class ResourceLimitError(RuntimeError):
    """A configured size cap would be exceeded."""


class ConsistencyError(RuntimeError):
    """An internal cross-check disagreed (e.g. normal form vs. BFS length)."""
