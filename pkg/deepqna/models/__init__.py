"""Data models for DeepQnA."""

from .decomposition import DecompositionExample, ExampleLibrary, Turn
from .document import Document
from .messages import (
    Channel,
    CompletionRequest,
    CompletionResult,
    FinishReason,
    LedgerEntry,
    Message,
    Role,
    Usage,
)
from .report import Metric, QuestionScore, Scaffold, ScoreReport, ThreadUsage, UsageReport
from .task import BoundVar, Budgets, PromptMode, TaskSpec, ThreadStatus
from .trace import TRACE_SCHEMA_VERSION, EventKind, RunResult, TraceEvent
from .world import (
    Anchor,
    AnchorKind,
    AnswerType,
    Gender,
    Hop,
    HopKind,
    Person,
    QuestionSpec,
    WorldGraph,
    WorldSpec,
)

__all__ = [
    "Anchor",
    "AnchorKind",
    "AnswerType",
    "BoundVar",
    "Budgets",
    "Channel",
    "CompletionRequest",
    "CompletionResult",
    "DecompositionExample",
    "Document",
    "EventKind",
    "ExampleLibrary",
    "FinishReason",
    "Gender",
    "Hop",
    "HopKind",
    "LedgerEntry",
    "Message",
    "Metric",
    "Person",
    "PromptMode",
    "QuestionScore",
    "QuestionSpec",
    "Role",
    "RunResult",
    "Scaffold",
    "ScoreReport",
    "TRACE_SCHEMA_VERSION",
    "TaskSpec",
    "ThreadStatus",
    "ThreadUsage",
    "TraceEvent",
    "Turn",
    "Usage",
    "UsageReport",
    "WorldGraph",
    "WorldSpec",
]
