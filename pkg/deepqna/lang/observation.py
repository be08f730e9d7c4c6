"""Rendering evaluation outcomes as observation text."""

from deepqna.lang.outcome import EvalOutcome
from deepqna.lang.values import render_value

MIN_CHAR_BUDGET = 64
NO_OUTPUT = "(no output)"
ELISION_MARKER = "\n[... {omitted} characters omitted]"


def _marker(omitted: int) -> str:
    return ELISION_MARKER.format(omitted=omitted)


def truncate(text: str, char_budget: int) -> str:
    """Shorten text to at most `char_budget` characters, ending in the elision marker.

    The cut is made at a line boundary when one lies in the second half of the
    kept prefix; otherwise the prefix is cut mid-line and the result is
    exactly `char_budget` characters long.
    """
    if len(text) <= char_budget:
        return text
    keep = max(char_budget - len(_marker(len(text))), 0)
    # fewer omitted characters can mean a shorter marker
    while keep + 1 + len(_marker(len(text) - keep - 1)) <= char_budget:
        keep += 1
    boundary = text.rfind("\n", 0, keep + 1)
    if boundary >= keep // 2 and boundary > 0:
        if boundary + len(_marker(len(text) - boundary)) <= char_budget:
            keep = boundary
    return text[:keep] + _marker(len(text) - keep)


def render_observation(outcome: EvalOutcome, char_budget: int = 4000) -> str:
    """Render an outcome as the text fed back to the model.

    Args:
        outcome: Evaluation outcome
        char_budget: Maximum length of the rendered text, at least 64

    Returns:
        Printed entries, then the final result, then any error, one per line
    """
    if char_budget < MIN_CHAR_BUDGET:
        raise ValueError(f"char_budget must be at least {MIN_CHAR_BUDGET}, got {char_budget}")
    pieces = list(outcome.printed)
    if outcome.result is not None:
        pieces.append(render_value(outcome.result))
    if outcome.error is not None:
        pieces.append(outcome.error.render())
    text = "\n".join(pieces)
    if not text:
        return NO_OUTPUT
    return truncate(text, char_budget)
