"""The reasoning loop: model turns alternating with code execution, with recursive sub-agents."""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Iterable, List, Optional, Sequence

from deepqna.config import prompts
from deepqna.config.settings import KernelSettings
from deepqna.corpus.index import CorpusIndex
from deepqna.decompositions.prompt import VariableDoc, render_system_prompt
from deepqna.decompositions.store import select
from deepqna.kernel.errors import HostFailure, MalformedTurn
from deepqna.kernel.hosts import corpus_hosts, llm_host, recursion_hosts, var_host
from deepqna.kernel.threads import PendingTask, ThreadContext, TokenBudget
from deepqna.kernel.trace import TraceSink
from deepqna.kernel.turns import ParsedTurn, parse_turn
from deepqna.lang.environment import Environment
from deepqna.lang.hosts import HostFunction, HostRegistry, final_answer_host
from deepqna.lang.interpreter import evaluate_source
from deepqna.lang.observation import render_observation
from deepqna.lang.outcome import EvalLimits
from deepqna.lang.source import CODE_CLOSE, CODE_OPEN, OBSERVATION_PREFIX
from deepqna.lang.values import render_value, type_summary
from deepqna.llm.errors import GatewayError
from deepqna.llm.gateway import LLMGateway
from deepqna.llm.ledger import UsageLedger, usage_report
from deepqna.models.decomposition import ExampleLibrary
from deepqna.models.messages import Channel, CompletionResult, FinishReason, Message, Role, Usage
from deepqna.models.task import Budgets, PromptMode, TaskSpec, ThreadStatus
from deepqna.models.trace import EventKind, RunResult

logger = logging.getLogger(__name__)

ROOT_ID = "root"


class _TokenBudgetExhausted(Exception):
    pass


class DeepReasoner:
    """
    Runs tasks by alternating model turns with formal code execution.

    A thread's code may call `dolores`/`add_task`/`run_all` to run subtasks
    in child threads with fresh environments, and `llm` for single
    associative completions. With `recursive=False` only `llm`, the tools and
    `FinalAnswer` remain and the loop is a plain single-thread code-acting agent.

    One reasoner may serve several runs at once; each run keeps its own
    ledger, token budget and trace.
    """

    def __init__(
        self,
        gateway: LLMGateway,
        library: Optional[ExampleLibrary] = None,
        budgets: Optional[Budgets] = None,
        settings: Optional[KernelSettings] = None,
        corpus: Optional[CorpusIndex] = None,
        tools: Sequence[HostFunction] = (),
        recursive: bool = True,
        preamble: str = prompts.PREAMBLE,
        top_k: int = 5,
        snippet_chars: int = 300,
        timestamps: bool = True,
    ):
        """
        Initialize the reasoner.

        Args:
            gateway: Completion gateway
            library: Decomposition examples; none when None
            budgets: Run limits (optional)
            settings: Kernel settings (optional)
            corpus: Corpus exposed through search/retrieve_article (optional)
            tools: Extra tool host functions
            recursive: Whether threads get dolores, add_task, run_all and Var
            preamble: System prompt preamble
            top_k: Default number of search hits
            snippet_chars: Body characters shown per search hit
            timestamps: Whether trace events carry wall-clock timestamps
        """
        self.gateway = gateway
        self.library = library or ExampleLibrary()
        self.budgets = budgets or Budgets()
        self.settings = settings or KernelSettings()
        self.recursive = recursive
        self.preamble = preamble
        self.timestamps = timestamps
        self.tools: List[HostFunction] = list(tools)
        if corpus is not None:
            self.tools.extend(corpus_hosts(corpus, top_k, snippet_chars))

    def run(self, spec: TaskSpec, root_id: str = ROOT_ID) -> RunResult:
        """
        Run a task to completion or budget exhaustion.

        Model misbehaviour and backend failures end up in the trace and the
        status; nothing about them is raised.

        Args:
            spec: Task and pre-seeded variables
            root_id: Id of the root thread

        Returns:
            RunResult: Answer, status, trace and usage
        """
        return _Session(self).run(spec, root_id)


class _Session:
    """One run: the threads it spawns share its ledger, token budget and trace sink."""

    def __init__(self, reasoner: DeepReasoner):
        self.reasoner = reasoner
        self.budgets = reasoner.budgets
        self.settings = reasoner.settings
        self.ledger = UsageLedger()
        self.gateway = reasoner.gateway.with_ledger(self.ledger)
        self.tokens = TokenBudget(self.budgets.max_total_tokens)
        self.sink = TraceSink(timestamps=reasoner.timestamps)
        self.failure: Optional[str] = None
        self._lock = threading.Lock()

    def run(self, spec: TaskSpec, root_id: str) -> RunResult:
        library = self.reasoner.library
        namespace = spec.namespace or self.settings.default_namespace or library.default_namespace or ""
        root = self._new_thread(root_id, None, 0, namespace, spec)
        self._loop(root, spec)
        logger.info(f"Run {root_id} ended with status {root.status.value}")
        return RunResult(
            answer=root.answer,
            status=root.status,
            trace=self.sink.events,
            usage=usage_report(self.ledger),
            root_id=root_id,
            failure=self.failure,
        )

    def _record_failure(self, message: str) -> None:
        with self._lock:
            if self.failure is None:
                self.failure = message

    # Runtime interface used by host functions

    def associate(self, thread: ThreadContext, prompt: str, variables: Dict[str, Any]) -> str:
        lines = [prompt]
        lines.extend(f"{name}: {render_value(value)}" for name, value in variables.items())
        messages = [
            Message(role=Role.SYSTEM, content=prompts.ASSOCIATIVE_SYSTEM),
            Message(role=Role.USER, content="\n\n".join(lines)),
        ]
        try:
            result = self._complete(thread, messages, Channel.LLM, stop_sequences=[])
        except _TokenBudgetExhausted:
            raise HostFailure("token budget exhausted") from None
        except GatewayError as e:
            self._record_failure(str(e))
            raise
        return result.text

    def run_child(self, parent: ThreadContext, child_id: str, spec: TaskSpec) -> ThreadContext:
        self._spawn_event(parent, child_id, spec)
        child = self._new_thread(child_id, parent.id, parent.depth + 1, spec.namespace, spec)
        self._child_loop(child, spec)
        return child

    def run_batch(self, parent: ThreadContext, pending: List[PendingTask]) -> List[ThreadContext]:
        cap = min(self.budgets.max_parallel_children, len(pending))
        self.sink.emit(
            parent.id,
            EventKind.BATCH_DISPATCH,
            {"children": [p.child_id for p in pending], "max_parallel": cap},
            self._usage(parent),
        )
        logger.info(f"{parent.id} dispatches {len(pending)} subtasks, {cap} at a time")
        children = []
        for p in pending:
            self._spawn_event(parent, p.child_id, p.spec)
            children.append(self._new_thread(p.child_id, parent.id, parent.depth + 1, p.spec.namespace, p.spec))

        # one executor per batch: a blocked parent never holds a worker its children need
        with ThreadPoolExecutor(max_workers=cap, thread_name_prefix=f"{parent.id}-batch") as pool:
            futures = [pool.submit(self._child_loop, child, p.spec) for child, p in zip(children, pending)]
            for future in futures:
                future.result()

        for child in children:
            if child.status is not ThreadStatus.FINISHED:
                logger.warning(f"Subtask {child.id} ended with status {child.status.value}: {child.reason}")
        return children

    # Threads

    def _new_thread(
        self, thread_id: str, parent_id: Optional[str], depth: int, namespace: str, spec: TaskSpec
    ) -> ThreadContext:
        return ThreadContext(
            id=thread_id,
            parent_id=parent_id,
            depth=depth,
            namespace=namespace,
            env=Environment({var.name: var.value for var in spec.variables}),
            budgets=self.budgets,
        )

    def _spawn_event(self, parent: ThreadContext, child_id: str, spec: TaskSpec) -> None:
        self.sink.emit(
            parent.id,
            EventKind.CHILD_SPAWN,
            {
                "child_id": child_id,
                "parent_id": parent.id,
                "task": spec.task,
                "namespace": spec.namespace,
                "variables": [v.name for v in spec.variables],
            },
            self._usage(parent),
        )

    def _hosts(self, thread: ThreadContext) -> HostRegistry:
        functions: List[HostFunction] = [llm_host(self, thread)]
        if self.reasoner.recursive:
            functions.extend(recursion_hosts(self, thread))
            functions.append(var_host())
        functions.extend(self.reasoner.tools)
        functions.append(final_answer_host())
        return HostRegistry(functions)

    def _system_prompt(self, thread: ThreadContext, spec: TaskSpec, hosts: HostRegistry) -> str:
        mode = self.settings.prompt_mode
        variables = [VariableDoc(v.name, v.description, type_summary(v.value)) for v in spec.variables]
        examples = select(self.reasoner.library, thread.namespace) if mode is PromptMode.EXAMPLES else []
        return render_system_prompt(examples, hosts.documented(), variables, mode, self.reasoner.preamble)

    def _usage(self, thread: ThreadContext) -> Usage:
        return self.ledger.thread_total(thread.id)

    def _finish(self, thread: ThreadContext, kind: EventKind, status: ThreadStatus, **payload: Any) -> None:
        thread.finish(status, payload.get("answer"), str(payload.get("reason", "")))
        self.sink.emit(thread.id, kind, payload, self._usage(thread))
        logger.info(f"Thread {thread.id} ended with status {status.value}")

    def _child_loop(self, thread: ThreadContext, spec: TaskSpec) -> None:
        """Run a subtask; anything it raises fails that thread only."""
        try:
            self._loop(thread, spec)
        except Exception as e:
            logger.exception(f"Thread {thread.id} raised unexpectedly")
            if not thread.status.terminal:
                reason = f"internal error: {type(e).__name__}: {e}"
                self._finish(thread, EventKind.ERROR, ThreadStatus.FAILED, reason=reason)

    def _loop(self, thread: ThreadContext, spec: TaskSpec) -> None:
        hosts = self._hosts(thread)
        limits = EvalLimits(max_steps=self.budgets.max_steps)
        thread.messages = [
            Message(role=Role.SYSTEM, content=self._system_prompt(thread, spec, hosts)),
            Message(role=Role.USER, content=spec.task),
        ]
        self.sink.emit(
            thread.id,
            EventKind.THREAD_START,
            {
                "parent_id": thread.parent_id,
                "depth": thread.depth,
                "namespace": thread.namespace,
                "task": spec.task,
                "variables": [v.name for v in spec.variables],
            },
        )
        logger.info(f"Thread {thread.id} started at depth {thread.depth}")

        malformed = 0
        while thread.turns < self.budgets.max_turns_per_thread:
            try:
                result = self._complete(thread, thread.messages, Channel.MODEL)
            except _TokenBudgetExhausted:
                self._finish(thread, EventKind.BUDGET_EXHAUSTED, ThreadStatus.BUDGET_EXHAUSTED, reason="token budget")
                return
            except GatewayError as e:
                self._record_failure(str(e))
                logger.error(f"Thread {thread.id} lost its backend: {e}")
                self._finish(thread, EventKind.ERROR, ThreadStatus.FAILED, reason=f"backend: {e}")
                return
            thread.turns += 1
            text = _close_block(result)
            thread.messages.append(Message(role=Role.ASSISTANT, content=text))

            try:
                parsed = parse_turn(text)
            except MalformedTurn as e:
                self.sink.emit(
                    thread.id,
                    EventKind.MODEL_TURN,
                    {"turn": thread.turns, "text": text, "malformed": str(e), "finish": result.finish.value},
                    self._usage(thread),
                )
                malformed += 1
                if malformed > self.budgets.malformed_turn_retries:
                    self._finish(thread, EventKind.ERROR, ThreadStatus.FAILED, reason=f"malformed turn: {e}")
                    return
                logger.warning(f"Malformed turn in {thread.id} ({e}), asking again")
                thread.messages.append(Message(role=Role.USER, content=prompts.MALFORMED_TURN))
                continue

            malformed = 0
            self._turn_event(thread, parsed, result)
            outcome = evaluate_source(parsed.code, thread.env, hosts, limits)
            self.sink.emit(
                thread.id,
                EventKind.EXECUTION,
                {
                    "steps": outcome.steps,
                    "printed": outcome.printed,
                    "error": outcome.error.render() if outcome.error else None,
                    "terminal": outcome.terminal is not None,
                },
                self._usage(thread),
            )
            if outcome.terminal is not None:
                answer = outcome.terminal.value
                self._finish(
                    thread, EventKind.FINAL_ANSWER, ThreadStatus.FINISHED, answer=answer, rendered=render_value(answer)
                )
                return

            observation = render_observation(outcome, self.budgets.observation_char_budget)
            thread.messages.append(Message(role=Role.USER, content=f"{OBSERVATION_PREFIX}\n{observation}"))
            self.sink.emit(thread.id, EventKind.OBSERVATION, {"text": observation}, self._usage(thread))

        self._finish(
            thread,
            EventKind.BUDGET_EXHAUSTED,
            ThreadStatus.BUDGET_EXHAUSTED,
            reason=f"turn budget of {self.budgets.max_turns_per_thread} reached",
        )

    def _turn_event(self, thread: ThreadContext, parsed: ParsedTurn, result: CompletionResult) -> None:
        payload: Dict[str, Any] = {
            "turn": thread.turns,
            "thought": parsed.thought,
            "code": parsed.code.text,
            "finish": result.finish.value,
        }
        if parsed.discarded_blocks:
            payload["discarded_blocks"] = parsed.discarded_blocks
        if parsed.trailing_text:
            payload["trailing_text"] = True
        self.sink.emit(thread.id, EventKind.MODEL_TURN, payload, self._usage(thread))

    def _complete(
        self,
        thread: ThreadContext,
        messages: Iterable[Message],
        channel: Channel,
        stop_sequences: Optional[List[str]] = None,
    ) -> CompletionResult:
        request = self.gateway.request(list(messages), thread.id, channel, stop_sequences=stop_sequences)
        if not self.tokens.admit(request.max_new_tokens):
            raise _TokenBudgetExhausted()
        spent = 0
        try:
            result = self.gateway.complete(request)
            spent = result.usage.completion_tokens
            return result
        finally:
            self.tokens.settle(request.max_new_tokens, spent)


def _close_block(result: CompletionResult) -> str:
    """Re-add the close delimiter the stop sequence swallowed."""
    text = result.text
    if result.finish is not FinishReason.STOP:
        return text
    lines = [line.strip() for line in text.splitlines()]
    if CODE_OPEN in lines and CODE_CLOSE not in lines[lines.index(CODE_OPEN) :]:
        return text.rstrip("\n") + "\n" + CODE_CLOSE
    return text
