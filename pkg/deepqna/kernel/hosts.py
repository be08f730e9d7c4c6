"""Host functions a reasoning thread exposes to its formal code."""

import logging
from typing import Any, Dict, List, Optional, Protocol

from deepqna.corpus.index import CorpusIndex
from deepqna.kernel.errors import HostFailure
from deepqna.kernel.threads import PendingTask, ThreadContext
from deepqna.lang.environment import Environment
from deepqna.lang.hosts import Effect, HostFunction
from deepqna.lang.values import DescribedValue, HostHandle
from deepqna.models.task import Budgets, BoundVar, TaskSpec, ThreadStatus

logger = logging.getLogger(__name__)

LLM = "llm"
DOLORES = "dolores"
ADD_TASK = "add_task"
RUN_ALL = "run_all"
VAR = "Var"
DOLORES_NAMESPACE = "DoLoReS"
SEARCH = "search"
RETRIEVE_ARTICLE = "retrieve_article"


class Runtime(Protocol):
    """What the recursion and associative hosts need from the kernel."""

    budgets: Budgets

    def associate(self, thread: ThreadContext, prompt: str, variables: Dict[str, Any]) -> str:
        ...

    def run_child(self, parent: ThreadContext, child_id: str, spec: TaskSpec) -> ThreadContext:
        ...

    def run_batch(self, parent: ThreadContext, pending: List[PendingTask]) -> List[ThreadContext]:
        ...


def error_sentinel(child: ThreadContext) -> Dict[str, str]:
    """Stand-in result for a failed child in a batch."""
    return {"error": child.status.value, "message": child.reason}


def child_value(child: ThreadContext) -> Any:
    """
    The answer of a finished child.

    Raises:
        HostFailure: If the child did not finish
    """
    if child.status is ThreadStatus.FINISHED:
        return child.answer
    raise HostFailure(f"subtask {child.id} ended with status {child.status.value}: {child.reason}")


def _unwrap(value: Any) -> Any:
    return value.value if isinstance(value, DescribedValue) else value


def _child_spec(parent: ThreadContext, task: Any, namespace: Any, variables: Dict[str, Any]) -> TaskSpec:
    if not isinstance(task, str) or not task.strip():
        raise HostFailure("task text must be a non-empty string")
    if namespace is not None and not isinstance(namespace, str):
        raise HostFailure("namespace must be a string")
    # children get copies; nothing they do reaches the caller's values
    copies = Environment({name: _unwrap(value) for name, value in variables.items()}).snapshot()
    bound = [
        BoundVar(
            name=name,
            value=copies[name],
            description=value.description if isinstance(value, DescribedValue) else "",
        )
        for name, value in variables.items()
    ]
    return TaskSpec(task=task, variables=bound, namespace=namespace or parent.namespace)


def _check_depth(runtime: Runtime, parent: ThreadContext) -> None:
    limit = runtime.budgets.max_depth
    if parent.depth + 1 > limit:
        raise HostFailure(f"recursion depth limit {limit} reached")


def var_host() -> HostFunction:
    return HostFunction(
        name=VAR,
        fn=lambda value, description="": DescribedValue(value, str(description)),
        signature="Var(value, description)",
        doc="Attach a description to a variable passed to a subtask.",
        min_args=1,
        max_args=2,
        keywords=frozenset({"description"}),
    )


def llm_host(runtime: Runtime, thread: ThreadContext) -> HostFunction:
    """The associative call: one completion, no examples and no tools."""

    def llm(prompt: Any = None, **variables: Any) -> str:
        if not isinstance(prompt, str) or not prompt.strip():
            raise HostFailure("prompt must be a non-empty string")
        return runtime.associate(thread, prompt, {k: _unwrap(v) for k, v in variables.items()})

    return HostFunction(
        name=LLM,
        fn=llm,
        effect=Effect.ASSOCIATIVE_CALL,
        signature="llm(prompt, **variables)",
        doc="Ask the language model one self-contained question. Keyword arguments are shown "
        "beneath the prompt. Returns the reply text.",
        max_args=1,
        blocking=True,
    )


def recursion_hosts(runtime: Runtime, thread: ThreadContext) -> List[HostFunction]:
    """dolores, add_task, run_all and the DoLoReS namespace bound to one thread."""

    def dolores(task: Any = None, namespace: Optional[str] = None, **variables: Any) -> Any:
        _check_depth(runtime, thread)
        spec = _child_spec(thread, task, namespace, variables)
        child = runtime.run_child(thread, thread.next_child_id(), spec)
        return child_value(child)

    def add_task(task: Any = None, namespace: Optional[str] = None, **variables: Any) -> HostHandle:
        _check_depth(runtime, thread)
        spec = _child_spec(thread, task, namespace, variables)
        child_id = thread.next_child_id()
        handle = HostHandle(f"task {child_id}", child_id)
        thread.pending.append(PendingTask(child_id=child_id, spec=spec, handle=handle))
        return handle

    def run_all() -> List[Any]:
        if not thread.pending:
            raise HostFailure("empty batch")
        pending, thread.pending = thread.pending, []
        children = runtime.run_batch(thread, pending)
        return [
            child.answer if child.status is ThreadStatus.FINISHED else error_sentinel(child)
            for child in children
        ]

    dolores_host = HostFunction(
        name=DOLORES,
        fn=dolores,
        effect=Effect.RECURSIVE_CALL,
        signature="dolores(task, namespace=None, **variables)",
        doc="Solve a subtask with a fresh sub-agent that sees only the keyword variables. "
        "Returns the sub-agent's FinalAnswer value.",
        max_args=2,
        blocking=True,
    )
    add_task_host = HostFunction(
        name=ADD_TASK,
        fn=add_task,
        effect=Effect.RECURSIVE_CALL,
        signature="add_task(task, namespace=None, **variables)",
        doc="Queue a subtask for run_all() and return a handle.",
        max_args=2,
    )
    run_all_host = HostFunction(
        name=RUN_ALL,
        fn=run_all,
        effect=Effect.RECURSIVE_CALL,
        signature="run_all()",
        doc="Run the queued subtasks in parallel and return their answers in queue order. "
        "A failed subtask yields {'error': status, 'message': text}.",
        max_args=0,
        keywords=False,
        blocking=True,
    )
    namespace_host = HostFunction(
        name=DOLORES_NAMESPACE,
        fn=dolores,
        effect=Effect.RECURSIVE_CALL,
        signature="DoLoReS(task, namespace=None, **variables)",
        doc="Same as dolores; DoLoReS.add_task and DoLoReS.run_all are add_task and run_all.",
        max_args=2,
        blocking=True,
        members={"add_task": add_task_host, "run_all": run_all_host},
    )
    return [dolores_host, add_task_host, run_all_host, namespace_host]


def corpus_hosts(index: CorpusIndex, top_k: int = 5, snippet_chars: int = 300) -> List[HostFunction]:
    """search and retrieve_article over a corpus index."""

    def search(query: Any = None, attribute: Any = None, k: Any = None) -> str:
        text = query if query is not None else attribute
        if not isinstance(text, str) or not text.strip():
            raise HostFailure("query must be a non-empty string")
        if k is not None and (not isinstance(k, int) or isinstance(k, bool) or k < 1):
            raise HostFailure("k must be a positive integer")
        return index.render_hits(index.search(text, k or top_k), snippet_chars)

    def retrieve_article(entity: Any = None, title: Any = None) -> str:
        name = entity if entity is not None else title
        if not isinstance(name, str):
            raise HostFailure("title must be a string")
        return index.retrieve_article(name).body

    return [
        HostFunction(
            name=SEARCH,
            fn=search,
            effect=Effect.TOOL_CALL,
            signature="search(query, k=5)",
            doc="Ranked search over the corpus; returns numbered hits with a snippet each.",
            max_args=2,
            keywords=frozenset({"query", "attribute", "k"}),
        ),
        HostFunction(
            name=RETRIEVE_ARTICLE,
            fn=retrieve_article,
            effect=Effect.TOOL_CALL,
            signature="retrieve_article(entity)",
            doc="The full article whose title is exactly `entity`.",
            max_args=1,
            keywords=frozenset({"entity", "title"}),
        ),
    ]
