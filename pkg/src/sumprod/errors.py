"""Shared error types for guard rails that cut across modules."""


class SnapWouldMergeError(ValueError):
    """Snapping to the grid would collapse two distinct values into one."""


class TooLargeError(ValueError):
    """Input exceeds a hard enumeration or memory guard."""
