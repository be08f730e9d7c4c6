"""Trace sink for reasoning runs."""

import json
import logging
import threading
from collections import defaultdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, DefaultDict, Dict, Iterable, List, Optional, Union

from deepqna.lang.values import render_value
from deepqna.llm.ledger import build_usage_report
from deepqna.models.messages import Usage
from deepqna.models.report import ThreadUsage, UsageReport
from deepqna.models.trace import EventKind, TraceEvent

logger = logging.getLogger(__name__)


def json_safe(value: Any) -> Any:
    """Convert a runtime value to JSON types; anything else becomes its rendering."""
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, dict) and all(isinstance(k, str) for k in value):
        return {k: json_safe(v) for k, v in value.items()}
    return render_value(value)


class TraceSink:
    """
    Collects trace events from concurrent threads.

    Sequence numbers are dense per thread; the event list keeps the global
    order in which events were appended.
    """

    def __init__(self, timestamps: bool = True):
        self.timestamps = timestamps
        self._events: List[TraceEvent] = []
        self._seq: DefaultDict[str, int] = defaultdict(int)
        self._lock = threading.Lock()

    def emit(
        self,
        thread_id: str,
        kind: EventKind,
        payload: Optional[Dict[str, Any]] = None,
        usage: Optional[Usage] = None,
    ) -> TraceEvent:
        ts = datetime.now(timezone.utc).isoformat() if self.timestamps else None
        with self._lock:
            event = TraceEvent(
                thread_id=thread_id,
                seq=self._seq[thread_id],
                kind=kind,
                payload=json_safe(payload or {}),
                usage=usage or Usage(),
                ts=ts,
            )
            self._seq[thread_id] += 1
            self._events.append(event)
        logger.debug(f"{thread_id}#{event.seq} {kind.value}")
        return event

    @property
    def events(self) -> List[TraceEvent]:
        with self._lock:
            return list(self._events)

    def __len__(self) -> int:
        with self._lock:
            return len(self._events)


def serialize_trace(events: Iterable[TraceEvent], timestamps: bool = False) -> str:
    """One JSON object per line; without timestamps the text is reproducible."""
    exclude = None if timestamps else {"ts"}
    return "".join(event.model_dump_json(exclude=exclude) + "\n" for event in events)


def write_trace(events: Iterable[TraceEvent], path: Union[str, Path], timestamps: bool = True) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_trace(events, timestamps), encoding="utf-8")
    return path


def read_trace(path: Union[str, Path]) -> List[TraceEvent]:
    """
    Load a trace file.

    Raises:
        ValueError: If a line is not a trace record
    """
    events = []
    for number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            events.append(TraceEvent.model_validate(json.loads(line)))
        except ValueError as e:
            raise ValueError(f"{path}:{number}: invalid trace record: {e}") from e
    return events


def filter_events(
    events: Iterable[TraceEvent],
    thread_id: Optional[str] = None,
    kind: Optional[EventKind] = None,
    depth: Optional[int] = None,
) -> List[TraceEvent]:
    """Events matching every given filter, in trace order."""
    return [
        e
        for e in events
        if (thread_id is None or e.thread_id == thread_id)
        and (kind is None or e.kind is kind)
        and (depth is None or e.depth == depth)
    ]


def trace_usage(events: Iterable[TraceEvent]) -> UsageReport:
    """
    Usage report recovered from a trace.

    Each thread's total is the cumulative usage on its last event; requests
    count its model turns.
    """
    last: Dict[str, Usage] = {}
    turns: DefaultDict[str, int] = defaultdict(int)
    for event in events:
        last[event.thread_id] = event.usage
        if event.kind is EventKind.MODEL_TURN:
            turns[event.thread_id] += 1
    return build_usage_report(
        ThreadUsage(thread_label=label, usage=usage, requests=turns[label]) for label, usage in last.items()
    )
