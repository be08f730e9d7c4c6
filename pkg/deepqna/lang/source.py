"""Source blocks handed to the formal language toolchain."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator

# Turn delimiters shared by the kernel and the example renderer.
CODE_OPEN = "<repl>"
CODE_CLOSE = "</repl>"
OBSERVATION_PREFIX = "Observation:"


class SourceOrigin(str, Enum):
    """Where a source block came from."""

    MODEL_TURN = "model-turn"
    EXAMPLE = "example"
    HARNESS = "harness"


class SourceBlock(BaseModel):
    """One code block from a model turn, an example, or the harness."""

    model_config = ConfigDict(frozen=True)

    text: str = Field(..., description="Code text")
    origin: SourceOrigin = Field(SourceOrigin.HARNESS, description="Block origin")

    @field_validator("text")
    @classmethod
    def validate_text(cls, v: str) -> str:
        """Reject empty blocks and blocks containing turn delimiters."""
        if not v or not v.strip():
            raise ValueError("Source block cannot be empty")
        for line in v.splitlines():
            if line.strip() in (CODE_OPEN, CODE_CLOSE):
                raise ValueError(f"Source block contains delimiter line {line.strip()!r}")
        return v
