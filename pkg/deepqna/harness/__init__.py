"""Synthetic worlds, questions, scoring, baselines and benchmark sweeps."""

from deepqna.harness.articles import render_article, render_articles
from deepqna.harness.baselines import (
    MalformedAction,
    ToolCall,
    codeact_reasoner,
    parse_action,
    run_codeact_baseline,
    run_react_baseline,
)
from deepqna.harness.benchmark import Runner, benchmark, build_report
from deepqna.harness.questions import (
    InfeasibleChain,
    fixture_questions,
    generate_questions,
    make_question,
    oracle_answer,
    related,
)
from deepqna.harness.records import (
    RecordError,
    load_questions,
    load_world,
    save_questions,
    save_score_report,
    save_world,
    score_records,
)
from deepqna.harness.scoring import (
    DEFAULT_TOLERANCE,
    score_question,
    score_relaxed_numeric,
    score_set_f1,
    score_token_f1,
)
from deepqna.harness.world import fixture_world, generate_world, validate_world

__all__ = [
    "DEFAULT_TOLERANCE",
    "InfeasibleChain",
    "MalformedAction",
    "RecordError",
    "Runner",
    "ToolCall",
    "benchmark",
    "build_report",
    "codeact_reasoner",
    "fixture_questions",
    "fixture_world",
    "generate_questions",
    "generate_world",
    "load_questions",
    "load_world",
    "make_question",
    "oracle_answer",
    "parse_action",
    "related",
    "render_article",
    "render_articles",
    "run_codeact_baseline",
    "run_react_baseline",
    "save_questions",
    "save_score_report",
    "save_world",
    "score_question",
    "score_records",
    "score_relaxed_numeric",
    "score_set_f1",
    "score_token_f1",
    "validate_world",
]
