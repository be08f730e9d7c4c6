"""Reasoning thread state and run-wide accounting."""

import threading
from dataclasses import dataclass, field
from typing import Any, List, Optional

from deepqna.lang.environment import Environment
from deepqna.lang.values import HostHandle
from deepqna.models.messages import Message
from deepqna.models.task import Budgets, TaskSpec, ThreadStatus


@dataclass
class PendingTask:
    """A child task enqueued by `add_task`, waiting for `run_all`."""

    child_id: str
    spec: TaskSpec
    handle: HostHandle


@dataclass
class ThreadContext:
    """One reasoning thread: its own environment, conversation and status."""

    id: str
    depth: int
    namespace: str
    env: Environment
    budgets: Budgets
    parent_id: Optional[str] = None
    messages: List[Message] = field(default_factory=list)
    status: ThreadStatus = ThreadStatus.RUNNING
    answer: Any = None
    reason: str = ""
    turns: int = 0
    pending: List[PendingTask] = field(default_factory=list)
    _children: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def next_child_id(self) -> str:
        with self._lock:
            self._children += 1
            return f"{self.id}.{self._children}"

    def finish(self, status: ThreadStatus, answer: Any = None, reason: str = "") -> None:
        """
        Move to a terminal status.

        Raises:
            RuntimeError: If the thread already ended or the status is not terminal
        """
        if not status.terminal:
            raise RuntimeError(f"{status.value} is not a terminal status")
        if self.status.terminal:
            raise RuntimeError(f"Thread {self.id} already ended with status {self.status.value}")
        self.status = status
        self.answer = answer
        self.reason = reason


class TokenBudget:
    """
    Run-wide completion-token budget.

    A request is admitted while spent plus reserved tokens are below the
    limit; it reserves its completion cap until it settles, so the run
    overshoots by at most one completion.
    """

    def __init__(self, limit: int):
        self.limit = limit
        self.spent = 0
        self.reserved = 0
        self._lock = threading.Lock()

    def admit(self, reservation: int) -> bool:
        with self._lock:
            if self.spent + self.reserved >= self.limit:
                return False
            self.reserved += reservation
            return True

    def settle(self, reservation: int, spent: int) -> None:
        with self._lock:
            self.reserved -= reservation
            self.spent += spent

    @property
    def exhausted(self) -> bool:
        with self._lock:
            return self.spent + self.reserved >= self.limit
