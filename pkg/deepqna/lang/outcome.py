"""Evaluation limits and outcomes."""

from typing import Any, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from deepqna.lang.errors import ErrorKind, FormalLanguageError

DEFAULT_STEP_BUDGET = 100_000


class EvalLimits(BaseModel):
    """Resource limits for one evaluation."""

    model_config = ConfigDict(frozen=True)

    max_steps: int = Field(DEFAULT_STEP_BUDGET, ge=1, description="Evaluation step budget")
    max_sequence_length: int = Field(
        10_000_000, ge=1, description="Largest string or list a single operation may build"
    )
    max_integer_bits: int = Field(100_000, ge=64, description="Largest integer a power may build")


class ErrorRecord(BaseModel):
    """A structured evaluation error."""

    model_config = ConfigDict(frozen=True)

    kind: ErrorKind
    message: str
    line: int = 0
    column: int = 0

    @classmethod
    def from_error(cls, error: FormalLanguageError) -> "ErrorRecord":
        return cls(
            kind=error.kind, message=error.message, line=error.span.line, column=error.span.column
        )

    def render(self) -> str:
        return f"Error({self.kind.value}): {self.message} @ {self.line}:{self.column}"


class TerminalPayload(BaseModel):
    """The argument of a FinalAnswer call."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    value: Any = None


class EvalOutcome(BaseModel):
    """Everything observable about one evaluation."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    result: Any = Field(None, description="Value of the final expression statement")
    printed: List[str] = Field(default_factory=list, description="Printed entries in order")
    terminal: Optional[TerminalPayload] = None
    error: Optional[ErrorRecord] = None
    steps: int = Field(0, ge=0, description="Evaluation steps used")

    @model_validator(mode="after")
    def check_exclusive(self) -> "EvalOutcome":
        if self.terminal is not None and self.error is not None:
            raise ValueError("An outcome cannot be both terminal and failed")
        return self
