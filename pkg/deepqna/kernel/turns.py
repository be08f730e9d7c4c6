"""Splitting model turns into thought and code."""

from typing import List

from pydantic import BaseModel, Field, ValidationError

from deepqna.kernel.errors import MalformedTurn
from deepqna.lang.source import CODE_CLOSE, CODE_OPEN, SourceBlock, SourceOrigin
from deepqna.models.decomposition import Turn


class ParsedTurn(BaseModel):
    """A model turn with what was dropped from it."""

    thought: str = ""
    code: SourceBlock
    discarded_blocks: int = Field(0, ge=0, description="Code blocks after the first")
    trailing_text: bool = Field(False, description="Non-blank text followed the first block")

    @property
    def turn(self) -> Turn:
        return Turn(thought=self.thought, code=self.code)


def _marker_lines(lines: List[str], marker: str, start: int = 0) -> List[int]:
    return [i for i in range(start, len(lines)) if lines[i].strip() == marker]


def parse_turn(model_text: str) -> ParsedTurn:
    """
    Split a model turn into its thought and its first code block.

    The thought is the text before the first `<repl>` line; the code is
    everything up to the next `</repl>` line. Later text is discarded.

    Args:
        model_text: Raw completion text

    Returns:
        ParsedTurn: Thought, code and what was discarded

    Raises:
        MalformedTurn: If there is no complete, non-empty code block
    """
    lines = model_text.splitlines()
    opens = _marker_lines(lines, CODE_OPEN)
    if not opens:
        raise MalformedTurn("no code block found")
    start = opens[0]
    closes = _marker_lines(lines, CODE_CLOSE, start + 1)
    if not closes:
        raise MalformedTurn("code block is not closed")
    end = closes[0]

    body = "\n".join(lines[start + 1 : end])
    try:
        code = SourceBlock(text=body, origin=SourceOrigin.MODEL_TURN)
    except ValidationError as e:
        raise MalformedTurn(e.errors()[0]["msg"]) from None

    rest = lines[end + 1 :]
    return ParsedTurn(
        thought="\n".join(lines[:start]).strip(),
        code=code,
        discarded_blocks=len(_marker_lines(rest, CODE_OPEN)),
        trailing_text=any(line.strip() for line in rest),
    )
