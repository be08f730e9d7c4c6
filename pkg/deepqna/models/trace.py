"""Trace events and run results."""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from deepqna.models.messages import Usage
from deepqna.models.report import UsageReport
from deepqna.models.task import ThreadStatus

TRACE_SCHEMA_VERSION = 1


class EventKind(str, Enum):
    """Kinds of trace events."""

    THREAD_START = "thread-start"
    MODEL_TURN = "model-turn"
    EXECUTION = "execution"
    OBSERVATION = "observation"
    CHILD_SPAWN = "child-spawn"
    BATCH_DISPATCH = "batch-dispatch"
    FINAL_ANSWER = "final-answer"
    ERROR = "error"
    BUDGET_EXHAUSTED = "budget-exhausted"

    @property
    def terminal(self) -> bool:
        return self in (EventKind.FINAL_ANSWER, EventKind.ERROR, EventKind.BUDGET_EXHAUSTED)


class TraceEvent(BaseModel):
    """One trace record."""

    model_config = ConfigDict(frozen=True)

    thread_id: str
    seq: int = Field(..., ge=0, description="Dense per-thread sequence number")
    kind: EventKind
    payload: Dict[str, Any] = Field(default_factory=dict)
    usage: Usage = Field(default_factory=Usage, description="Cumulative usage of the thread")
    schema_version: int = TRACE_SCHEMA_VERSION
    ts: Optional[str] = Field(None, description="Wall-clock timestamp, the only nondeterministic field")

    @property
    def depth(self) -> int:
        return self.thread_id.count(".")


class RunResult(BaseModel):
    """The outcome of one reasoning run."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    answer: Any = None
    status: ThreadStatus
    trace: List[TraceEvent] = Field(default_factory=list)
    usage: UsageReport = Field(default_factory=UsageReport)
    root_id: str = "root"
    failure: Optional[str] = Field(None, description="Backend error that ended the run, if any")

    @property
    def finished(self) -> bool:
        return self.status is ThreadStatus.FINISHED

    def events(self, kind: Optional[EventKind] = None, thread_id: Optional[str] = None) -> List[TraceEvent]:
        return [
            e
            for e in self.trace
            if (kind is None or e.kind is kind) and (thread_id is None or e.thread_id == thread_id)
        ]

    @property
    def thread_ids(self) -> List[str]:
        return [e.thread_id for e in self.trace if e.kind is EventKind.THREAD_START]
