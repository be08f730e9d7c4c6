"""Gateway errors."""


class GatewayError(Exception):
    """Base class for completion gateway failures."""


class TransportError(GatewayError):
    """The backend stayed unreachable after every retry attempt."""

    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} attempt(s))")
        self.attempts = attempts


class BackendRefusal(GatewayError):
    """The backend rejected the request with a non-retryable status."""

    def __init__(self, message: str, status: int = 0):
        super().__init__(message)
        self.status = status


class MockMiss(GatewayError):
    """No mock rule matched a request."""

    def __init__(self, thread_label: str, turn: int, channel: str):
        super().__init__(f"No mock rule matched thread '{thread_label}' turn {turn} (channel {channel})")
        self.thread_label = thread_label
        self.turn = turn
        self.channel = channel


class TransientBackendError(GatewayError):
    """Raised by a backend to ask the gateway for a retry."""
