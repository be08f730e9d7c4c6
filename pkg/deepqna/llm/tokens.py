"""Token approximations for backends without a tokenizer."""

import re
from typing import Tuple

_WORD = re.compile(r"\S+")


def approximate_tokens(text: str) -> int:
    """Whitespace-delimited word count."""
    return len(text.split())


def truncate_tokens(text: str, limit: int) -> Tuple[str, bool]:
    """
    Cut text after its first `limit` words.

    Returns:
        The kept prefix, and whether anything was cut
    """
    for index, match in enumerate(_WORD.finditer(text)):
        if index == limit:
            return text[: match.start()].rstrip(), True
    return text, False


def delimited_tokens(text: str, delimiters: Tuple[str, str]) -> int:
    """Words between every pair of reasoning delimiters; an unclosed opener runs to the end."""
    start, end = delimiters
    if not start:
        return 0
    count = 0
    position = 0
    while True:
        opened = text.find(start, position)
        if opened < 0:
            return count
        body_start = opened + len(start)
        closed = text.find(end, body_start) if end else -1
        if closed < 0:
            return count + approximate_tokens(text[body_start:])
        count += approximate_tokens(text[body_start:closed])
        position = closed + len(end)
