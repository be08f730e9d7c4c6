"""Task specifications and budgets for reasoning runs."""

from enum import Enum
from typing import Any, List

from pydantic import BaseModel, ConfigDict, Field, field_validator


class PromptMode(str, Enum):
    """How decomposition guidance is rendered into a system prompt."""

    EXAMPLES = "examples"
    NO_EXAMPLES = "no-examples"
    PRINCIPLES = "principles"


class ThreadStatus(str, Enum):
    """Lifecycle of a reasoning thread."""

    RUNNING = "running"
    FINISHED = "finished"
    FAILED = "failed"
    BUDGET_EXHAUSTED = "budget-exhausted"

    @property
    def terminal(self) -> bool:
        return self is not ThreadStatus.RUNNING


class Budgets(BaseModel):
    """Limits applied to a run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    max_depth: int = Field(4, ge=0, description="Deepest allowed recursive call; 0 forbids recursion")
    max_turns_per_thread: int = Field(12, ge=1, description="Model turns per thread")
    max_total_tokens: int = Field(200_000, ge=1, description="Completion tokens across all threads")
    observation_char_budget: int = Field(4000, ge=64, description="Characters per observation")
    max_parallel_children: int = Field(8, ge=1, description="Concurrent children per batch")
    malformed_turn_retries: int = Field(2, ge=0, description="Corrective retries per malformed turn")
    max_steps: int = Field(100_000, ge=1, description="Evaluation steps per code block")


class BoundVar(BaseModel):
    """A variable pre-seeded into a thread's environment."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str = Field(..., description="Identifier")
    value: Any = Field(None, description="Runtime value")
    description: str = Field("", description="Shown in the variable documentation")

    @field_validator("name")
    @classmethod
    def validate_name(cls, v: str) -> str:
        """Validate that the name is an identifier."""
        if not v.isidentifier():
            raise ValueError(f"Not a valid identifier: {v!r}")
        return v


class TaskSpec(BaseModel):
    """A task to reason about."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    task: str = Field(..., description="Task text")
    variables: List[BoundVar] = Field(default_factory=list, description="Pre-seeded variables")
    namespace: str = Field("", description="Namespace for example selection")

    @field_validator("task")
    @classmethod
    def validate_task(cls, v: str) -> str:
        """Validate the task text."""
        if not v or not v.strip():
            raise ValueError("Task cannot be empty")
        return v

    @field_validator("variables")
    @classmethod
    def validate_unique(cls, v: List[BoundVar]) -> List[BoundVar]:
        """Validate that variable names are unique."""
        names = [var.name for var in v]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"Duplicate variable names: {', '.join(duplicates)}")
        return v
