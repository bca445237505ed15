"""Exception hierarchy shared by every module."""


class GameError(ValueError):
    """Malformed game, strategy or input document."""


class PreconditionError(ValueError):
    """An operation was called on inputs outside its domain."""


class CapExceeded(RuntimeError):
    """An exhaustive computation would exceed its configured cap."""

    def __init__(self, message: str, needed: int | None = None, cap: int | None = None):
        super().__init__(message)
        self.needed = needed
        self.cap = cap


class InternalError(AssertionError):
    """A proven guarantee was violated; this always signals a bug."""


class NotAChain(ValueError):
    """Raised when a graph is not an open chain of cycles.

    ``reason`` is one of ``bidirectional``, ``degree``, ``shape`` or ``cover``.
    """

    def __init__(self, reason: str, detail: str):
        super().__init__(f"{reason}: {detail}")
        self.reason = reason
        self.detail = detail
