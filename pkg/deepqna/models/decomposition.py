"""Decomposition example models."""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from deepqna.lang.source import SourceBlock

FINAL_ANSWER_CALL = "FinalAnswer("


class Turn(BaseModel):
    """One thought/code/observation step of an example."""

    model_config = ConfigDict(frozen=True)

    thought: str = Field("", description="Untagged reasoning text before the code block")
    code: SourceBlock = Field(..., description="The code block")
    observation: Optional[str] = Field(None, description="Observation shown after the block")


class DecompositionExample(BaseModel):
    """A namespaced few-shot decomposition."""

    model_config = ConfigDict(frozen=True)

    namespace: str = Field(..., description="Namespace tag used for selection")
    task: str = Field(..., description="Task text")
    turns: Tuple[Turn, ...] = Field(..., description="Ordered turns")

    @field_validator("namespace", "task")
    @classmethod
    def validate_not_blank(cls, v: str) -> str:
        """Validate that the field is not blank."""
        if not v or not v.strip():
            raise ValueError("Field cannot be empty")
        return v

    @model_validator(mode="after")
    def validate_turns(self) -> "DecompositionExample":
        """Validate turn structure."""
        if not self.turns:
            raise ValueError("An example needs at least one turn")
        if FINAL_ANSWER_CALL not in self.turns[-1].code.text:
            raise ValueError("The final turn must call FinalAnswer")
        for position, turn in enumerate(self.turns[:-1], start=1):
            if turn.observation is None:
                raise ValueError(f"Turn {position} needs an observation")
        return self

    @property
    def code_blocks(self) -> int:
        return len(self.turns)


class ExampleLibrary(BaseModel):
    """An ordered collection of examples with a namespace index."""

    model_config = ConfigDict(frozen=True)

    examples: Tuple[DecompositionExample, ...] = Field(default=(), description="Examples in file order")
    default_namespace: Optional[str] = Field(None, description="Fallback namespace for selection")

    @property
    def index(self) -> Dict[str, List[int]]:
        """Namespace to example positions."""
        index: Dict[str, List[int]] = {}
        for position, example in enumerate(self.examples):
            index.setdefault(example.namespace, []).append(position)
        return index

    @property
    def namespaces(self) -> List[str]:
        return list(self.index)

    def __len__(self) -> int:
        return len(self.examples)
