"""Corpus document model."""

from pathlib import Path
from typing import Union

from pydantic import BaseModel, ConfigDict, Field, field_validator


class Document(BaseModel):
    """A titled document in a corpus."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(..., description="Unique document id")
    title: str = Field(..., description="Unique document title")
    body: str = Field("", description="Document text")

    @field_validator("id", "title")
    @classmethod
    def validate_not_blank(cls, v: str) -> str:
        """Validate that the field is not blank."""
        if not v or not v.strip():
            raise ValueError("Field cannot be empty")
        return v

    @classmethod
    def from_file(cls, file_path: Union[str, Path]) -> "Document":
        """
        Create a Document from a plain-text file.

        The file name (without extension) is the id and the first line is the title.

        Args:
            file_path: Path to the file

        Returns:
            Document: Created document

        Raises:
            FileNotFoundError: If file not found
            ValueError: If the file has no title line
        """
        if isinstance(file_path, str):
            file_path = Path(file_path)

        if not file_path.exists():
            raise FileNotFoundError(f"File not found: {file_path}")

        text = file_path.read_text(encoding="utf-8")
        title, _, body = text.partition("\n")
        if not title.strip():
            raise ValueError(f"Missing title line: {file_path}")
        return cls(id=file_path.stem, title=title.strip(), body=body)

    def to_text(self) -> str:
        """Serialize as a plain-text file: title line, then body."""
        return f"{self.title}\n{self.body}"
