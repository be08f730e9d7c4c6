"""Answer metrics."""

from collections import Counter
from typing import Any, Iterable, Optional, Set, Tuple

from deepqna.models.report import Metric
from deepqna.models.world import QuestionSpec

DEFAULT_TOLERANCE = 0.05


def score_set_f1(predicted: Iterable[str], gold: Iterable[str]) -> float:
    """Set F1 of exact-match answers; two empty sets score 1."""
    pred, truth = set(predicted), set(gold)
    if not pred and not truth:
        return 1.0
    shared = len(pred & truth)
    if shared == 0:
        return 0.0
    precision = shared / len(pred)
    recall = shared / len(truth)
    return 2 * precision * recall / (precision + recall)


def score_token_f1(predicted: str, gold: str) -> float:
    """Bag-of-tokens F1 over lowercased whitespace-split tokens."""
    pred, truth = predicted.lower().split(), gold.lower().split()
    if not pred and not truth:
        return 1.0
    shared = sum((Counter(pred) & Counter(truth)).values())
    if shared == 0:
        return 0.0
    precision = shared / len(pred)
    recall = shared / len(truth)
    return 2 * precision * recall / (precision + recall)


def as_number(value: Any) -> Optional[float]:
    """A numeric reading of a prediction, or None."""
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value.strip().replace(",", ""))
        except ValueError:
            return None
    if isinstance(value, (list, tuple)) and len(value) == 1:
        return as_number(value[0])
    return None


def score_relaxed_numeric(predicted: Any, gold: Any, tolerance: float = DEFAULT_TOLERANCE) -> bool:
    """
    Whether a prediction lies within `tolerance` of the gold value.

    A gold value of 0 needs an exact 0; a non-numeric prediction is wrong.

    Raises:
        ValueError: If tolerance is negative or gold is not numeric
    """
    if tolerance < 0:
        raise ValueError(f"tolerance must be non-negative, got {tolerance}")
    truth = as_number(gold)
    if truth is None:
        raise ValueError(f"gold value is not numeric: {gold!r}")
    value = as_number(predicted)
    if value is None:
        return False
    return abs(value - truth) <= tolerance * abs(truth)


def answer_set(predicted: Any) -> Set[str]:
    """A prediction as a set of names: lists give their items, strings split on commas."""
    if predicted is None:
        return set()
    if isinstance(predicted, (list, tuple, set)):
        return {str(item).strip() for item in predicted if str(item).strip()}
    return {part.strip() for part in str(predicted).split(",") if part.strip()}


def answer_text(predicted: Any) -> str:
    if predicted is None:
        return ""
    if isinstance(predicted, (list, tuple)):
        return " ".join(str(item) for item in predicted)
    return str(predicted)


def score_question(question: QuestionSpec, predicted: Any, tolerance: float = DEFAULT_TOLERANCE) -> Tuple[float, float]:
    """
    Score a prediction with the question's metric.

    Returns:
        (score, exact match), both in [0, 1]
    """
    metric = question.metric
    if metric is Metric.SET_F1:
        pred = answer_set(predicted)
        return score_set_f1(pred, question.gold), float(pred == set(question.gold))
    if metric is Metric.TOKEN_F1:
        text = answer_text(predicted)
        gold = question.gold[0] if question.gold else ""
        return score_token_f1(text, gold), float(text.strip().lower() == gold.strip().lower())
    correct = bool(question.gold) and score_relaxed_numeric(predicted, question.gold[0], tolerance)
    exact = bool(question.gold) and as_number(predicted) == as_number(question.gold[0])
    return float(correct), float(exact)
