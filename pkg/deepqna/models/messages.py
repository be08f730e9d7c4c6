"""Chat messages, completion requests and token usage."""

from datetime import datetime, timezone
from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field, field_validator


class Role(str, Enum):
    """Message roles."""

    SYSTEM = "system"
    USER = "user"
    ASSISTANT = "assistant"


class Channel(str, Enum):
    """Which kind of call produced a request."""

    MODEL = "model"
    LLM = "llm"


class FinishReason(str, Enum):
    """Why a completion stopped."""

    STOP = "stop"
    LENGTH = "length"
    ERROR = "error"


class Message(BaseModel):
    """A chat message."""

    model_config = ConfigDict(frozen=True)

    role: Role
    content: str = Field(..., description="Message text")


class CompletionRequest(BaseModel):
    """A chat completion request."""

    messages: List[Message] = Field(..., description="Conversation, system message first")
    temperature: float = Field(0.0, ge=0.0, description="Sampling temperature")
    max_new_tokens: int = Field(1024, ge=1, description="Completion token cap")
    stop_sequences: List[str] = Field(default_factory=list, description="Stop sequences")
    thread_label: str = Field(..., description="Id of the requesting thread")
    channel: Channel = Field(Channel.MODEL, description="Model turn or associative call")

    @field_validator("messages")
    @classmethod
    def validate_messages(cls, v: List[Message]) -> List[Message]:
        """Validate that the request starts with a system message."""
        if not v:
            raise ValueError("A request needs at least one message")
        if v[0].role is not Role.SYSTEM:
            raise ValueError("The first message must be a system message")
        return v

    @property
    def last_user_message(self) -> str:
        for message in reversed(self.messages):
            if message.role is Role.USER:
                return message.content
        return ""


class Usage(BaseModel):
    """Token counts for one completion."""

    model_config = ConfigDict(frozen=True)

    prompt_tokens: int = Field(0, ge=0)
    completion_tokens: int = Field(0, ge=0)
    reasoning_tokens: int = Field(0, ge=0)

    def __add__(self, other: "Usage") -> "Usage":
        return Usage(
            prompt_tokens=self.prompt_tokens + other.prompt_tokens,
            completion_tokens=self.completion_tokens + other.completion_tokens,
            reasoning_tokens=self.reasoning_tokens + other.reasoning_tokens,
        )


class CompletionResult(BaseModel):
    """A completion and its usage."""

    text: str = Field("", description="Generated text")
    usage: Usage = Field(default_factory=Usage)
    finish: FinishReason = Field(FinishReason.STOP)
    approximate_usage: bool = Field(False, description="True when counts are estimated")


class LedgerEntry(BaseModel):
    """One recorded completion."""

    model_config = ConfigDict(frozen=True)

    thread_label: str
    channel: Channel = Channel.MODEL
    usage: Usage
    timestamp: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    approximate: bool = False
