"""Synthetic world and question models."""

from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from deepqna.models.report import Metric

WORLD_SCHEMA_VERSION = 1

RELATION_ROLES = ("mother", "father", "son", "daughter", "wife", "husband", "friend")
DERIVED_ROLES = ("daughter-in-law", "son-in-law", "brother", "sister")
ATTRIBUTE_KEYS = ("date_of_birth", "occupation", "hobby")

MAX_HOPS = 5


def attribute_words(key: str) -> str:
    """Attribute key as it reads in text, e.g. "date of birth"."""
    return key.replace("_", " ")


class Gender(str, Enum):
    FEMALE = "female"
    MALE = "male"


class Person(BaseModel):
    """A person in a world."""

    name: str = Field(..., description="Unique full name")
    gender: Gender
    relations: Dict[str, List[str]] = Field(default_factory=dict, description="Role to target names")
    attributes: Dict[str, str] = Field(default_factory=dict, description="Attribute key to value")

    def related(self, role: str) -> List[str]:
        return self.relations.get(role, [])


class WorldSpec(BaseModel):
    """Parameters of world generation."""

    size: int = Field(50, ge=2, description="Number of persons")
    seed: int = Field(1, description="Generator seed")
    schema_version: int = Field(WORLD_SCHEMA_VERSION, description="Relation schema version")

    @field_validator("schema_version")
    @classmethod
    def validate_schema(cls, v: int) -> int:
        if v != WORLD_SCHEMA_VERSION:
            raise ValueError(f"Unsupported world schema version: {v}")
        return v


class WorldGraph(BaseModel):
    """A generated universe of persons, relations and attributes."""

    spec: WorldSpec = Field(default_factory=WorldSpec)
    persons: List[Person] = Field(default_factory=list)

    def by_name(self) -> Dict[str, Person]:
        return {p.name: p for p in self.persons}

    def person(self, name: str) -> Optional[Person]:
        return self.by_name().get(name)


class AnswerType(str, Enum):
    """What a question asks for."""

    NAMES = "names"
    ATTRIBUTE = "attribute"
    COUNT = "count"

    @property
    def metric(self) -> Metric:
        return {
            AnswerType.NAMES: Metric.SET_F1,
            AnswerType.ATTRIBUTE: Metric.TOKEN_F1,
            AnswerType.COUNT: Metric.RELAXED_NUMERIC,
        }[self]


class AnchorKind(str, Enum):
    NAME = "name"
    ATTRIBUTE = "attribute"


class Anchor(BaseModel):
    """Where a question starts: a named person or everyone with an attribute value."""

    kind: AnchorKind
    value: str
    key: Optional[str] = Field(None, description="Attribute key for attribute anchors")

    @model_validator(mode="after")
    def validate_key(self) -> "Anchor":
        if self.kind is AnchorKind.ATTRIBUTE and self.key not in ATTRIBUTE_KEYS:
            raise ValueError(f"Unknown attribute key: {self.key}")
        return self


class HopKind(str, Enum):
    RELATION = "relation"
    ATTRIBUTE = "attribute"
    COUNT = "count"


class Hop(BaseModel):
    """One step of a question chain."""

    kind: HopKind
    name: str = Field("", description="Role or attribute key; empty for count")

    @model_validator(mode="after")
    def validate_name(self) -> "Hop":
        if self.kind is HopKind.RELATION and self.name not in RELATION_ROLES + DERIVED_ROLES:
            raise ValueError(f"Unknown relation role: {self.name}")
        if self.kind is HopKind.ATTRIBUTE and self.name not in ATTRIBUTE_KEYS:
            raise ValueError(f"Unknown attribute key: {self.name}")
        return self


class QuestionSpec(BaseModel):
    """A question with its gold answer set."""

    id: str
    anchor: Anchor
    chain: List[Hop]
    surface: str
    gold: List[str] = Field(default_factory=list, description="Sorted gold answers")
    answer_type: AnswerType = AnswerType.NAMES

    @field_validator("chain")
    @classmethod
    def validate_chain(cls, v: List[Hop]) -> List[Hop]:
        if not 1 <= len(v) <= MAX_HOPS:
            raise ValueError(f"Chains have 1 to {MAX_HOPS} hops, got {len(v)}")
        for hop in v[:-1]:
            if hop.kind is not HopKind.RELATION:
                raise ValueError("Only the last hop may be an attribute lookup or a count")
        if v[-1].kind is HopKind.COUNT and len(v) < 2:
            raise ValueError("A count hop must follow a relation hop")
        return v

    @property
    def metric(self) -> Metric:
        return self.answer_type.metric
