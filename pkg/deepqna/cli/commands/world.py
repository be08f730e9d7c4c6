"""World command for the CLI."""

import argparse
import logging
from pathlib import Path

from deepqna.cli.common import ExitStatus, report_input_error
from deepqna.config import get_settings
from deepqna.corpus.store import save_corpus
from deepqna.harness.articles import render_articles
from deepqna.harness.questions import generate_questions
from deepqna.harness.records import save_questions, save_world
from deepqna.harness.world import generate_world
from deepqna.models.world import MAX_HOPS, WorldSpec

logger = logging.getLogger(__name__)

WORLD_FILE = "world.jsonl"
CORPUS_FILE = "corpus.jsonl"
QUESTIONS_FILE = "questions.jsonl"


def configure_parser(parser: argparse.ArgumentParser) -> None:
    """
    Configure the argument parser for the world command.

    Args:
        parser: The parser to configure
    """
    harness = get_settings().harness
    actions = parser.add_subparsers(dest="action", required=True)
    gen = actions.add_parser("gen", help="Generate a world, its articles and questions")
    gen.add_argument("--size", type=int, default=harness.world_size, help=f"Persons (default: {harness.world_size})")
    gen.add_argument("--seed", type=int, default=harness.seed, help=f"Seed (default: {harness.seed})")
    gen.add_argument(
        "--questions",
        type=int,
        default=harness.question_count,
        help=f"Questions to generate (default: {harness.question_count})",
    )
    gen.add_argument(
        "--max-hops", type=int, default=harness.max_hops, help=f"Longest chain, 1-{MAX_HOPS} (default: {harness.max_hops})"
    )
    gen.add_argument("--output", "-o", required=True, help="Output directory")


def execute(args: argparse.Namespace) -> int:
    """
    Execute the world command.

    Writes world.jsonl, corpus.jsonl and questions.jsonl; identical arguments
    give byte-identical files.

    Args:
        args: The parsed arguments

    Returns:
        Exit code
    """
    try:
        spec = WorldSpec(size=args.size, seed=args.seed)
        world = generate_world(spec)
        questions = generate_questions(
            world,
            args.questions,
            args.seed,
            max_hops=args.max_hops,
            resample_attempts=get_settings().harness.resample_attempts,
        )
    except ValueError as e:
        return report_input_error(e)

    output = Path(args.output)
    save_world(world, output / WORLD_FILE)
    save_corpus(render_articles(world), output / CORPUS_FILE)
    save_questions(questions, output / QUESTIONS_FILE)
    print(f"Generated {len(world.persons)} persons and {len(questions)} questions in {output}")
    return ExitStatus.SUCCESS
