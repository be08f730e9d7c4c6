"""Uniform completion interface with retries, a concurrency cap and usage accounting."""

import logging
import threading
import time
from typing import Callable, List, Optional, Sequence

from deepqna.config.settings import ConfigError, GatewaySettings, read_credential
from deepqna.llm.base import Backend
from deepqna.llm.errors import TransientBackendError, TransportError
from deepqna.llm.ledger import UsageLedger
from deepqna.llm.mock import MockBackend, resolve_mock_script
from deepqna.llm.openai_backend import OpenAIBackend
from deepqna.models.messages import Channel, CompletionRequest, CompletionResult, Message

logger = logging.getLogger(__name__)


class LLMGateway:
    """
    Completion gateway shared by every reasoning thread of a run.

    Concurrent callers share one in-flight cap. Each successful completion is
    recorded in the ledger under the request's thread label.
    """

    def __init__(
        self,
        backend: Backend,
        settings: Optional[GatewaySettings] = None,
        ledger: Optional[UsageLedger] = None,
        sleep: Callable[[float], None] = time.sleep,
        semaphore: Optional[threading.BoundedSemaphore] = None,
    ):
        """
        Initialize the gateway.

        Args:
            backend: Completion backend
            settings: Gateway settings (optional)
            ledger: Usage ledger; a new one when None
            sleep: Called with each backoff delay
            semaphore: In-flight cap to share with another gateway (optional)
        """
        self.backend = backend
        self.settings = settings or GatewaySettings()
        self.ledger = ledger if ledger is not None else UsageLedger()
        self._sleep = sleep
        self._semaphore = semaphore or threading.BoundedSemaphore(self.settings.max_in_flight)

    def with_ledger(self, ledger: UsageLedger) -> "LLMGateway":
        """A gateway on the same backend and in-flight cap, recording into another ledger."""
        return LLMGateway(self.backend, self.settings, ledger, self._sleep, self._semaphore)

    def request(
        self,
        messages: Sequence[Message],
        thread_label: str,
        channel: Channel = Channel.MODEL,
        max_new_tokens: Optional[int] = None,
        stop_sequences: Optional[List[str]] = None,
    ) -> CompletionRequest:
        """Build a request with the configured defaults."""
        return CompletionRequest(
            messages=list(messages),
            temperature=self.settings.temperature,
            max_new_tokens=max_new_tokens or self.settings.max_new_tokens,
            stop_sequences=self.settings.stop_sequences if stop_sequences is None else stop_sequences,
            thread_label=thread_label,
            channel=channel,
        )

    def _delay(self, attempt: int) -> float:
        backoff = self.settings.backoff_seconds
        if not backoff:
            return 0.0
        return backoff[min(attempt - 1, len(backoff) - 1)]

    def complete(self, request: CompletionRequest) -> CompletionResult:
        """
        Run a completion.

        Args:
            request: Completion request

        Returns:
            CompletionResult: The backend's result

        Raises:
            TransportError: If every attempt failed transiently
            BackendRefusal: If the backend rejected the request
            MockMiss: If no mock rule matched
        """
        attempts = self.settings.attempts
        for attempt in range(1, attempts + 1):
            try:
                with self._semaphore:
                    result = self.backend.complete(request)
            except TransientBackendError as e:
                if attempt == attempts:
                    logger.error(f"Completion for {request.thread_label} failed: {e}")
                    raise TransportError(str(e), attempts) from e
                delay = self._delay(attempt)
                logger.warning(
                    f"Transient backend failure for {request.thread_label} "
                    f"(attempt {attempt}/{attempts}), retrying in {delay}s: {e}"
                )
                self._sleep(delay)
                continue

            self.ledger.record(
                request.thread_label,
                result.usage,
                channel=request.channel,
                approximate=result.approximate_usage,
            )
            return result
        raise TransportError("no attempts configured", attempts)


def create_backend(settings: GatewaySettings) -> Backend:
    """
    Backend selected by the settings: the mock when a script is configured.

    Raises:
        ConfigError: If the endpoint credential is missing
    """
    if settings.mock_script is not None:
        return MockBackend(resolve_mock_script(settings.mock_script), settings.reasoning_delimiters)
    api_key = read_credential()
    if not api_key:
        raise ConfigError("No endpoint credential: set DEEPQNA_API_KEY or OPENAI_API_KEY")
    return OpenAIBackend(
        api_key=api_key,
        model=settings.model,
        base_url=settings.base_url,
        timeout_seconds=settings.timeout_seconds,
        reasoning_delimiters=settings.reasoning_delimiters,
    )
