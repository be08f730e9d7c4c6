"""Benchmark sweeps of one scaffold over a question set."""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Callable, Dict, List, Optional, Sequence

from tqdm import tqdm

from deepqna.config.settings import KernelSettings
from deepqna.corpus.index import CorpusIndex
from deepqna.harness.baselines import codeact_reasoner, run_react_baseline
from deepqna.harness.scoring import DEFAULT_TOLERANCE, score_question
from deepqna.kernel.agent import DeepReasoner
from deepqna.llm.gateway import LLMGateway
from deepqna.llm.ledger import combine_reports
from deepqna.models.decomposition import ExampleLibrary
from deepqna.models.report import QuestionScore, Scaffold, ScoreReport, UsageReport
from deepqna.models.task import Budgets, TaskSpec
from deepqna.models.trace import RunResult
from deepqna.models.world import QuestionSpec

logger = logging.getLogger(__name__)

ResultCallback = Callable[[QuestionSpec, RunResult], None]


class Runner:
    """Runs single questions under one scaffold."""

    def __init__(
        self,
        scaffold: Scaffold,
        index: CorpusIndex,
        gateway: LLMGateway,
        budgets: Optional[Budgets] = None,
        library: Optional[ExampleLibrary] = None,
        kernel_settings: Optional[KernelSettings] = None,
        top_k: int = 5,
        snippet_chars: int = 300,
        timestamps: bool = True,
    ):
        self.scaffold = scaffold
        self.index = index
        self.gateway = gateway
        self.budgets = budgets or Budgets()
        self.top_k = top_k
        self.snippet_chars = snippet_chars
        self.timestamps = timestamps
        self.reasoner: Optional[DeepReasoner] = None
        if scaffold is Scaffold.RECURSIVE:
            self.reasoner = DeepReasoner(
                gateway,
                library=library,
                budgets=self.budgets,
                settings=kernel_settings,
                corpus=index,
                top_k=top_k,
                snippet_chars=snippet_chars,
                timestamps=timestamps,
            )
        elif scaffold is Scaffold.CODEACT:
            self.reasoner = codeact_reasoner(index, gateway, self.budgets, top_k, snippet_chars, timestamps)

    def run(self, question: QuestionSpec) -> RunResult:
        """Run one question with its id as the root thread id."""
        if self.reasoner is not None:
            return self.reasoner.run(TaskSpec(task=question.surface), root_id=question.id)
        return run_react_baseline(
            question.surface,
            self.index,
            self.gateway,
            self.budgets,
            root_id=question.id,
            top_k=self.top_k,
            snippet_chars=self.snippet_chars,
            timestamps=self.timestamps,
        )


def _score(index: int, question: QuestionSpec, result: RunResult, tolerance: float) -> QuestionScore:
    score, exact = score_question(question, result.answer, tolerance) if result.finished else (0.0, 0.0)
    return QuestionScore(
        index=index,
        question_id=question.id,
        metric=question.metric,
        score=score,
        exact_match=exact,
        predicted=result.answer,
        gold=question.gold,
        status=result.status.value,
        threads=result.usage.thread_count,
        completion_tokens=result.usage.total.completion_tokens,
        max_thread_completion_tokens=result.usage.max_thread_completion_tokens,
        error=result.failure,
    )


def _failed(index: int, question: QuestionSpec, error: Exception) -> QuestionScore:
    return QuestionScore(
        index=index,
        question_id=question.id,
        metric=question.metric,
        score=0.0,
        exact_match=0.0,
        gold=question.gold,
        status="error",
        error=f"{type(error).__name__}: {error}",
    )


def _mean(values: Sequence[float]) -> Optional[float]:
    return sum(values) / len(values) if values else None


def build_report(
    scaffold: Scaffold,
    scores: Sequence[QuestionScore],
    usage: UsageReport,
    config: Optional[Dict[str, Any]] = None,
) -> ScoreReport:
    """
    Aggregate per-question scores.

    Aggregates are None when there are no scores.
    """
    ordered = sorted(scores, key=lambda s: s.index)
    per_metric: Dict[str, List[float]] = {}
    for s in ordered:
        per_metric.setdefault(s.metric.value, []).append(s.score)
    return ScoreReport(
        scaffold=scaffold,
        scores=ordered,
        aggregate=_mean([s.score for s in ordered]),
        aggregate_exact_match=_mean([s.exact_match for s in ordered]),
        per_metric={metric: sum(v) / len(v) for metric, v in per_metric.items()},
        usage=usage,
        mean_thread_completion_tokens=(
            usage.total.completion_tokens / usage.thread_count if usage.thread_count else None
        ),
        config=config or {},
    )


def benchmark(
    scaffold: Scaffold,
    questions: Sequence[QuestionSpec],
    index: CorpusIndex,
    gateway: LLMGateway,
    budgets: Optional[Budgets] = None,
    library: Optional[ExampleLibrary] = None,
    kernel_settings: Optional[KernelSettings] = None,
    tolerance: float = DEFAULT_TOLERANCE,
    workers: int = 4,
    config: Optional[Dict[str, Any]] = None,
    top_k: int = 5,
    snippet_chars: int = 300,
    timestamps: bool = True,
    on_result: Optional[ResultCallback] = None,
    progress: bool = True,
) -> ScoreReport:
    """
    Run every question under one scaffold and score the answers.

    Questions run concurrently up to `workers`; a question whose run raises
    scores 0 with the error recorded. Scores are merged by question index, so
    the report does not depend on completion order.

    Args:
        scaffold: Scaffold to drive
        questions: Questions to ask
        index: Corpus the tools read
        gateway: Completion gateway
        budgets: Per-question run limits (optional)
        library: Decomposition examples for the recursive scaffold (optional)
        kernel_settings: Kernel settings for the recursive scaffold (optional)
        tolerance: Relaxed numeric tolerance
        workers: Questions in flight at once
        config: Config snapshot stored in the report
        top_k: Hits per search
        snippet_chars: Body characters shown per hit
        timestamps: Whether trace events carry wall-clock timestamps
        on_result: Called with each question and its run result
        progress: Whether to show a progress bar

    Returns:
        ScoreReport: Per-question scores, aggregates and merged usage
    """
    runner = Runner(scaffold, index, gateway, budgets, library, kernel_settings, top_k, snippet_chars, timestamps)
    scores: List[QuestionScore] = []
    usages: Dict[int, UsageReport] = {}
    logger.info(f"Benchmarking {len(questions)} questions with the {scaffold.value} scaffold")

    with ThreadPoolExecutor(max_workers=max(1, workers), thread_name_prefix="bench") as pool:
        futures = {pool.submit(runner.run, q): (i, q) for i, q in enumerate(questions)}
        for future in tqdm(as_completed(futures), total=len(futures), desc=scaffold.value, disable=not progress):
            i, question = futures[future]
            try:
                result = future.result()
            except Exception as e:
                logger.error(f"Question {question.id} failed: {e}")
                scores.append(_failed(i, question, e))
                continue
            if on_result is not None:
                on_result(question, result)
            usages[i] = result.usage
            scores.append(_score(i, question, result, tolerance))

    usage = combine_reports(usages[i] for i in sorted(usages))
    report = build_report(scaffold, scores, usage, config)
    aggregate = "n/a" if report.aggregate is None else f"{report.aggregate:.3f}"
    logger.info(f"{scaffold.value} scaffold scored {aggregate} over {len(questions)} questions")
    return report
