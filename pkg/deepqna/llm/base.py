"""Base backend interface."""

import logging
from abc import ABC, abstractmethod

from deepqna.models.messages import CompletionRequest, CompletionResult

logger = logging.getLogger(__name__)


class Backend(ABC):
    """
    Base class for completion backends.

    Backends raise TransientBackendError for failures worth retrying and
    BackendRefusal for everything else; the gateway owns retries and usage
    accounting.
    """

    name: str = "backend"

    @abstractmethod
    def complete(self, request: CompletionRequest) -> CompletionResult:
        """
        Produce one completion.

        Args:
            request: Completion request

        Returns:
            CompletionResult: Text, usage and finish reason
        """
        pass
