"""Usage and score reports."""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from deepqna.models.messages import Usage


class ThreadUsage(BaseModel):
    """Token totals for one thread."""

    thread_label: str
    usage: Usage = Field(default_factory=Usage)
    requests: int = Field(0, ge=0)


class UsageReport(BaseModel):
    """Summary of a usage ledger."""

    per_thread: List[ThreadUsage] = Field(default_factory=list, description="Totals in first-seen order")
    total: Usage = Field(default_factory=Usage)
    thread_count: int = Field(0, ge=0)
    mean_completion_tokens: str = Field("0.00", description="Mean per-thread completion tokens")
    mean_reasoning_tokens: str = Field("0.00", description="Mean per-thread reasoning tokens")
    max_thread_completion_tokens: int = Field(0, ge=0)
    approximate: bool = Field(False, description="True when any count was estimated")

    def thread(self, label: str) -> Optional[ThreadUsage]:
        for entry in self.per_thread:
            if entry.thread_label == label:
                return entry
        return None

    def render_table(self) -> str:
        """Human-readable table."""
        lines = [f"{'thread':<24} {'requests':>8} {'prompt':>10} {'completion':>10} {'reasoning':>10}"]
        for entry in self.per_thread:
            u = entry.usage
            lines.append(
                f"{entry.thread_label:<24} {entry.requests:>8} {u.prompt_tokens:>10} "
                f"{u.completion_tokens:>10} {u.reasoning_tokens:>10}"
            )
        t = self.total
        lines.append(
            f"{'TOTAL':<24} {sum(e.requests for e in self.per_thread):>8} {t.prompt_tokens:>10} "
            f"{t.completion_tokens:>10} {t.reasoning_tokens:>10}"
        )
        lines.append(
            f"threads: {self.thread_count}  mean completion/thread: {self.mean_completion_tokens}  "
            f"mean reasoning/thread: {self.mean_reasoning_tokens}"
            + ("  (approximate counts)" if self.approximate else "")
        )
        return "\n".join(lines)


class Scaffold(str, Enum):
    """Agent scaffolds the benchmark can drive."""

    RECURSIVE = "recursive"
    REACT = "react"
    CODEACT = "codeact"


class Metric(str, Enum):
    """Scoring metrics."""

    SET_F1 = "set-f1"
    TOKEN_F1 = "token-f1"
    RELAXED_NUMERIC = "relaxed-numeric"


class QuestionScore(BaseModel):
    """Score of one benchmark question."""

    index: int = Field(..., ge=0)
    question_id: str
    metric: Metric
    score: float = Field(..., ge=0.0, le=1.0)
    exact_match: float = Field(..., ge=0.0, le=1.0)
    predicted: Any = None
    gold: List[str] = Field(default_factory=list)
    status: str = ""
    threads: int = Field(0, ge=0)
    completion_tokens: int = Field(0, ge=0)
    max_thread_completion_tokens: int = Field(0, ge=0)
    error: Optional[str] = None


class ScoreReport(BaseModel):
    """Scores of one benchmark sweep."""

    scaffold: Scaffold
    scores: List[QuestionScore] = Field(default_factory=list)
    aggregate: Optional[float] = Field(None, description="Mean score; None when there are no questions")
    aggregate_exact_match: Optional[float] = None
    per_metric: Dict[str, float] = Field(default_factory=dict)
    usage: UsageReport = Field(default_factory=UsageReport)
    mean_thread_completion_tokens: Optional[float] = None
    config: Dict[str, Any] = Field(default_factory=dict, description="Config snapshot")

    def render_table(self) -> str:
        """Human-readable table."""
        lines = [f"scaffold: {self.scaffold.value}"]
        lines.append(f"{'#':>3} {'question':<12} {'metric':<16} {'score':>6} {'em':>4} {'status':<17} {'threads':>7}")
        for s in self.scores:
            lines.append(
                f"{s.index:>3} {s.question_id:<12} {s.metric.value:<16} {s.score:>6.3f} "
                f"{s.exact_match:>4.1f} {s.status:<17} {s.threads:>7}"
            )
        aggregate = "n/a" if self.aggregate is None else f"{self.aggregate:.3f}"
        exact = "n/a" if self.aggregate_exact_match is None else f"{self.aggregate_exact_match:.3f}"
        lines.append(f"aggregate: {aggregate}  exact match: {exact}")
        for metric, value in self.per_metric.items():
            lines.append(f"  {metric}: {value:.3f}")
        lines.append(self.usage.render_table())
        return "\n".join(lines)
