"""Backend for OpenAI-compatible chat-completion endpoints."""

import logging
from typing import Any, Optional, Tuple

import openai

from deepqna.llm.base import Backend
from deepqna.llm.errors import BackendRefusal, TransientBackendError
from deepqna.llm.tokens import approximate_tokens, delimited_tokens
from deepqna.models.messages import CompletionRequest, CompletionResult, FinishReason, Usage

logger = logging.getLogger(__name__)

_RETRYABLE = (openai.APITimeoutError, openai.APIConnectionError, openai.RateLimitError, openai.InternalServerError)


class OpenAIBackend(Backend):
    """Chat completions over HTTP with the `openai` client."""

    name = "openai"

    def __init__(
        self,
        api_key: str,
        model: str,
        base_url: Optional[str] = None,
        timeout_seconds: float = 60.0,
        reasoning_delimiters: Tuple[str, str] = ("<think>", "</think>"),
        client: Optional[Any] = None,
    ):
        """
        Initialize the backend.

        Args:
            api_key: Endpoint credential
            model: Model name
            base_url: Endpoint URL; the OpenAI default when None
            timeout_seconds: Per-request timeout
            reasoning_delimiters: Delimiters used when the endpoint reports no reasoning tokens
            client: Preconfigured client (optional)
        """
        self.model = model
        self.reasoning_delimiters = reasoning_delimiters
        # The gateway retries; the client must not.
        self.client = client or openai.OpenAI(
            api_key=api_key, base_url=base_url, timeout=timeout_seconds, max_retries=0
        )

    def complete(self, request: CompletionRequest) -> CompletionResult:
        messages = [{"role": m.role.value, "content": m.content} for m in request.messages]
        kwargs = {
            "model": self.model,
            "messages": messages,
            "temperature": request.temperature,
            "max_tokens": request.max_new_tokens,
        }
        if request.stop_sequences:
            kwargs["stop"] = request.stop_sequences[:4]

        try:
            response = self.client.chat.completions.create(**kwargs)
        except _RETRYABLE as e:
            raise TransientBackendError(f"{type(e).__name__}: {e}") from e
        except openai.APIStatusError as e:
            if e.status_code >= 500:
                raise TransientBackendError(f"status {e.status_code}: {e}") from e
            raise BackendRefusal(f"Endpoint refused the request: {e}", status=e.status_code) from e
        except openai.OpenAIError as e:
            raise BackendRefusal(f"Endpoint error: {e}") from e

        if not response.choices:
            raise TransientBackendError("Endpoint returned no choices")
        choice = response.choices[0]
        text = choice.message.content or ""
        finish = FinishReason.LENGTH if choice.finish_reason == "length" else FinishReason.STOP
        usage, approximate = self._usage(response, request, text)
        return CompletionResult(text=text, usage=usage, finish=finish, approximate_usage=approximate)

    def _usage(self, response: Any, request: CompletionRequest, text: str) -> Tuple[Usage, bool]:
        reported = getattr(response, "usage", None)
        if reported is None:
            prompt = sum(approximate_tokens(m.content) for m in request.messages)
            completion = approximate_tokens(text)
            reasoning = min(delimited_tokens(text, self.reasoning_delimiters), completion)
            return Usage(prompt_tokens=prompt, completion_tokens=completion, reasoning_tokens=reasoning), True

        completion = reported.completion_tokens or 0
        details = getattr(reported, "completion_tokens_details", None)
        reasoning = getattr(details, "reasoning_tokens", None) if details is not None else None
        approximate = False
        if reasoning is None:
            reasoning = delimited_tokens(text, self.reasoning_delimiters)
            approximate = reasoning > 0
        usage = Usage(
            prompt_tokens=reported.prompt_tokens or 0,
            completion_tokens=completion,
            reasoning_tokens=min(reasoning, completion),
        )
        return usage, approximate
