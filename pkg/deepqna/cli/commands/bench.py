"""Benchmark command for the CLI."""

import argparse
import logging
from pathlib import Path

from deepqna.cli.common import (
    INPUT_ERRORS,
    ExitStatus,
    add_config_arguments,
    build_gateway,
    index_documents,
    load_index,
    load_library,
    report_input_error,
    resolve_settings,
    write_json,
)
from deepqna.config.settings import ConfigError
from deepqna.harness.articles import render_articles
from deepqna.harness.benchmark import benchmark
from deepqna.harness.questions import fixture_questions
from deepqna.harness.records import load_questions, load_world, save_score_report
from deepqna.harness.world import fixture_world, validate_world
from deepqna.kernel.trace import write_trace
from deepqna.models.report import Scaffold
from deepqna.models.trace import RunResult
from deepqna.models.world import QuestionSpec

logger = logging.getLogger(__name__)

SCORES_FILE = "scores.jsonl"
REPORT_FILE = "report.txt"
USAGE_FILE = "usage.json"
CONFIG_FILE = "config.json"
TRACES_DIR = "traces"


def configure_parser(parser: argparse.ArgumentParser) -> None:
    """
    Configure the argument parser for the bench command.

    Args:
        parser: The parser to configure
    """
    parser.add_argument(
        "--scaffold",
        "-s",
        choices=[s.value for s in Scaffold],
        default=Scaffold.RECURSIVE.value,
        help="Scaffold to drive (default: recursive)",
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--questions", "-q", help="Question records file")
    source.add_argument(
        "--fixture", action="store_true", help="Use the bundled five-question fixture and its world"
    )
    parser.add_argument("--world", "-w", help="World records file the questions were generated from")
    parser.add_argument("--corpus", help="Corpus to search instead of the world's rendered articles")
    parser.add_argument("--workers", type=int, help="Questions run concurrently (default from config)")
    parser.add_argument("--tolerance", type=float, help="Relaxed numeric tolerance (default 0.05)")
    parser.add_argument("--no-progress", action="store_true", help="Hide the progress bar")
    add_config_arguments(parser)


def execute(args: argparse.Namespace) -> int:
    """
    Execute the bench command.

    A completed sweep exits 0 whatever the scores.

    Args:
        args: The parsed arguments

    Returns:
        Exit code
    """
    try:
        settings = resolve_settings(args)
        if args.fixture:
            world = fixture_world()
            questions = fixture_questions(world)
        else:
            if not args.world:
                raise ConfigError("--world is required with --questions")
            questions = load_questions(args.questions)
            world = load_world(args.world)
        problems = validate_world(world)
        if problems:
            raise ConfigError(f"Invalid world: {problems[0]}")
        index = load_index(args.corpus, settings) or index_documents(render_articles(world), settings)
        library = load_library(settings)
        gateway = build_gateway(settings)
    except INPUT_ERRORS as e:
        return report_input_error(e)

    output_dir = Path(settings.output_dir)
    timestamps = not args.no_timestamps

    def keep_trace(question: QuestionSpec, result: RunResult) -> None:
        write_trace(result.trace, output_dir / TRACES_DIR / f"{question.id}.jsonl", timestamps=timestamps)

    scaffold = Scaffold(args.scaffold)
    config = {
        "scaffold": scaffold.value,
        "questions": args.questions or "fixture",
        "world": args.world or "fixture",
        **settings.snapshot(),
    }
    report = benchmark(
        scaffold,
        questions,
        index,
        gateway,
        budgets=settings.budgets,
        library=library,
        kernel_settings=settings.kernel,
        tolerance=args.tolerance if args.tolerance is not None else settings.harness.tolerance,
        workers=args.workers or settings.harness.sweep_workers,
        config=config,
        top_k=settings.corpus.top_k,
        snippet_chars=settings.corpus.snippet_chars,
        timestamps=timestamps,
        on_result=keep_trace,
        progress=not args.no_progress,
    )

    table = report.render_table()
    save_score_report(report, output_dir / SCORES_FILE)
    (output_dir / REPORT_FILE).write_text(table + "\n", encoding="utf-8")
    write_json(output_dir / USAGE_FILE, report.usage.model_dump(mode="json"))
    write_json(output_dir / CONFIG_FILE, config)
    print(table)
    print(f"Scores: {output_dir / SCORES_FILE}")
    return ExitStatus.SUCCESS
