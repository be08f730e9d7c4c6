"""Single-thread comparison scaffolds: structured tool calling and code acting."""

import json
import logging
import re
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, ValidationError

from deepqna.config import prompts
from deepqna.config.settings import KernelSettings
from deepqna.corpus.index import CorpusIndex, NotFound
from deepqna.kernel.agent import ROOT_ID, DeepReasoner
from deepqna.kernel.threads import TokenBudget
from deepqna.kernel.trace import TraceSink
from deepqna.lang.observation import truncate
from deepqna.lang.source import OBSERVATION_PREFIX
from deepqna.llm.errors import GatewayError
from deepqna.llm.gateway import LLMGateway
from deepqna.llm.ledger import UsageLedger, usage_report
from deepqna.models.messages import Channel, Message, Role
from deepqna.models.task import Budgets, PromptMode, TaskSpec, ThreadStatus
from deepqna.models.trace import EventKind, RunResult

logger = logging.getLogger(__name__)

_ACTION = re.compile(r"^\s*Action:\s*(\{.*\})\s*$")


class ToolCall(BaseModel):
    """One structured tool call."""

    name: Literal["search", "retrieve_article", "final_answer"]
    arguments: Dict[str, Any] = Field(default_factory=dict)


class MalformedAction(ValueError):
    """A turn holds no valid action line."""


def parse_action(text: str) -> ToolCall:
    """
    The last `Action: {...}` line of a turn.

    Raises:
        MalformedAction: If there is none or it is not a valid tool call
    """
    for line in reversed(text.splitlines()):
        match = _ACTION.match(line)
        if match is None:
            continue
        try:
            return ToolCall.model_validate(json.loads(match.group(1)))
        except (json.JSONDecodeError, ValidationError) as e:
            raise MalformedAction(f"invalid action: {e}") from None
    raise MalformedAction("no action line found")


def _run_tool(call: ToolCall, index: CorpusIndex, top_k: int, snippet_chars: int) -> str:
    args = call.arguments
    if call.name == "search":
        query = args.get("query", args.get("attribute"))
        if not isinstance(query, str) or not query.strip():
            return "Error: search needs a non-empty query"
        return index.render_hits(index.search(query, top_k), snippet_chars)
    title = args.get("entity", args.get("title"))
    if not isinstance(title, str):
        return "Error: retrieve_article needs an entity"
    try:
        return index.retrieve_article(title).body
    except NotFound as e:
        return f"Error: {e}"


def run_react_baseline(
    question: str,
    index: CorpusIndex,
    gateway: LLMGateway,
    budgets: Optional[Budgets] = None,
    root_id: str = ROOT_ID,
    top_k: int = 5,
    snippet_chars: int = 300,
    timestamps: bool = True,
) -> RunResult:
    """
    Answer a question with one thread of structured tool calls.

    Each turn ends with `Action: {"name": ..., "arguments": {...}}` naming
    search, retrieve_article or final_answer; tool output comes back as an
    observation. Budgets, corrective retries and the trace format match the
    reasoning kernel.

    Args:
        question: Question text
        index: Corpus the tools read
        gateway: Completion gateway
        budgets: Run limits (optional)
        root_id: Thread id
        top_k: Hits per search
        snippet_chars: Body characters shown per hit
        timestamps: Whether trace events carry wall-clock timestamps

    Returns:
        RunResult: Single-thread result
    """
    budgets = budgets or Budgets()
    ledger = UsageLedger()
    run_gateway = gateway.with_ledger(ledger)
    tokens = TokenBudget(budgets.max_total_tokens)
    sink = TraceSink(timestamps=timestamps)
    failure: Optional[str] = None
    messages: List[Message] = [
        Message(role=Role.SYSTEM, content=prompts.REACT_PREAMBLE),
        Message(role=Role.USER, content=question),
    ]
    sink.emit(root_id, EventKind.THREAD_START, {"parent_id": None, "depth": 0, "namespace": "", "task": question})

    def finish(status: ThreadStatus, kind: EventKind, answer: Any = None, **payload: Any) -> RunResult:
        sink.emit(root_id, kind, {"answer": answer, **payload}, ledger.thread_total(root_id))
        logger.info(f"Tool-calling run {root_id} ended with status {status.value}")
        return RunResult(
            answer=answer,
            status=status,
            trace=sink.events,
            usage=usage_report(ledger),
            root_id=root_id,
            failure=failure,
        )

    turns = 0
    malformed = 0
    while turns < budgets.max_turns_per_thread:
        request = run_gateway.request(messages, root_id, Channel.MODEL, stop_sequences=[])
        if not tokens.admit(request.max_new_tokens):
            return finish(ThreadStatus.BUDGET_EXHAUSTED, EventKind.BUDGET_EXHAUSTED, reason="token budget")
        spent = 0
        try:
            result = run_gateway.complete(request)
            spent = result.usage.completion_tokens
        except GatewayError as e:
            failure = str(e)
            return finish(ThreadStatus.FAILED, EventKind.ERROR, reason=f"backend: {e}")
        finally:
            tokens.settle(request.max_new_tokens, spent)
        turns += 1
        messages.append(Message(role=Role.ASSISTANT, content=result.text))

        try:
            call = parse_action(result.text)
        except MalformedAction as e:
            sink.emit(root_id, EventKind.MODEL_TURN, {"turn": turns, "text": result.text, "malformed": str(e)},
                      ledger.thread_total(root_id))
            malformed += 1
            if malformed > budgets.malformed_turn_retries:
                return finish(ThreadStatus.FAILED, EventKind.ERROR, reason=f"malformed turn: {e}")
            logger.warning(f"Malformed action in {root_id} ({e}), asking again")
            messages.append(Message(role=Role.USER, content=prompts.REACT_MALFORMED_TURN))
            continue

        malformed = 0
        sink.emit(
            root_id,
            EventKind.MODEL_TURN,
            {"turn": turns, "text": result.text, "action": call.model_dump()},
            ledger.thread_total(root_id),
        )
        if call.name == "final_answer":
            answer = call.arguments.get("answer")
            return finish(ThreadStatus.FINISHED, EventKind.FINAL_ANSWER, answer=answer, rendered=repr(answer))

        observation = truncate(_run_tool(call, index, top_k, snippet_chars), budgets.observation_char_budget)
        sink.emit(root_id, EventKind.EXECUTION, {"tool": call.name, "arguments": call.arguments})
        sink.emit(root_id, EventKind.OBSERVATION, {"text": observation}, ledger.thread_total(root_id))
        messages.append(Message(role=Role.USER, content=f"{OBSERVATION_PREFIX}\n{observation}"))

    return finish(
        ThreadStatus.BUDGET_EXHAUSTED,
        EventKind.BUDGET_EXHAUSTED,
        reason=f"turn budget of {budgets.max_turns_per_thread} reached",
    )


def codeact_reasoner(
    index: Optional[CorpusIndex],
    gateway: LLMGateway,
    budgets: Optional[Budgets] = None,
    top_k: int = 5,
    snippet_chars: int = 300,
    timestamps: bool = True,
) -> DeepReasoner:
    """The kernel loop without recursion hosts or examples."""
    return DeepReasoner(
        gateway,
        library=None,
        budgets=budgets,
        settings=KernelSettings(prompt_mode=PromptMode.NO_EXAMPLES),
        corpus=index,
        recursive=False,
        preamble=prompts.CODEACT_PREAMBLE,
        top_k=top_k,
        snippet_chars=snippet_chars,
        timestamps=timestamps,
    )


def run_codeact_baseline(
    question: str,
    index: Optional[CorpusIndex],
    gateway: LLMGateway,
    budgets: Optional[Budgets] = None,
    root_id: str = ROOT_ID,
    top_k: int = 5,
    snippet_chars: int = 300,
    timestamps: bool = True,
) -> RunResult:
    """
    Answer a question in one code-acting thread.

    The thread sees search, retrieve_article, llm and FinalAnswer only, so
    every step of reasoning stays in its own context.
    """
    reasoner = codeact_reasoner(index, gateway, budgets, top_k, snippet_chars, timestamps)
    return reasoner.run(TaskSpec(task=question), root_id=root_id)
