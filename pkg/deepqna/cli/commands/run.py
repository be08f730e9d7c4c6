"""Run command for the CLI."""

import argparse
import json
import logging
from pathlib import Path
from typing import Any, List

from deepqna.cli.common import (
    INPUT_ERRORS,
    ExitStatus,
    add_config_arguments,
    build_gateway,
    load_index,
    load_library,
    report_input_error,
    resolve_settings,
    write_json,
)
from deepqna.config.settings import ConfigError
from deepqna.kernel.agent import ROOT_ID, DeepReasoner
from deepqna.kernel.trace import json_safe, write_trace
from deepqna.models.task import BoundVar, TaskSpec
from deepqna.models.trace import RunResult

logger = logging.getLogger(__name__)

ANSWER_FILE = "answer.json"
TRACE_FILE = "trace.jsonl"
CONFIG_FILE = "config.json"
USAGE_FILE = "usage.json"


def configure_parser(parser: argparse.ArgumentParser) -> None:
    """
    Configure the argument parser for the run command.

    Args:
        parser: The parser to configure
    """
    parser.add_argument("task", help="Task text")
    parser.add_argument("--namespace", "-n", default="", help="Namespace of the root thread's examples")
    parser.add_argument("--corpus", help="Corpus directory or JSONL file; enables search and retrieve_article")
    parser.add_argument(
        "--var",
        action="append",
        default=[],
        metavar="NAME=JSON",
        help="Pre-seed a variable with a JSON value (repeatable)",
    )
    parser.add_argument("--root-id", default=ROOT_ID, help=f"Root thread id (default: {ROOT_ID})")
    add_config_arguments(parser)


def parse_variables(items: List[str]) -> List[BoundVar]:
    """
    `NAME=JSON` items as bound variables; a value that is not JSON is taken as a string.

    Raises:
        ConfigError: If an item has no `=` or the name is not an identifier
    """
    variables = []
    for item in items:
        name, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"Variables are given as NAME=JSON, got {item!r}")
        try:
            value: Any = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        try:
            variables.append(BoundVar(name=name.strip(), value=value))
        except ValueError as e:
            raise ConfigError(f"Invalid variable {name!r}: {e}") from e
    return variables


def format_answer(answer: Any) -> str:
    if isinstance(answer, str):
        return answer
    return json.dumps(json_safe(answer))


def write_run(output_dir: Path, task: str, result: RunResult, config: dict, timestamps: bool) -> Path:
    """
    Write the run directory: answer, trace, config snapshot and usage report.

    Returns:
        Path: The trace file
    """
    write_json(
        output_dir / ANSWER_FILE,
        {
            "task": task,
            "answer": json_safe(result.answer),
            "status": result.status.value,
            "root_id": result.root_id,
            "failure": result.failure,
        },
    )
    write_json(output_dir / CONFIG_FILE, config)
    write_json(output_dir / USAGE_FILE, result.usage.model_dump(mode="json"))
    return write_trace(result.trace, output_dir / TRACE_FILE, timestamps=timestamps)


def execute(args: argparse.Namespace) -> int:
    """
    Execute the run command.

    Args:
        args: The parsed arguments

    Returns:
        Exit code
    """
    try:
        settings = resolve_settings(args)
        library = load_library(settings)
        index = load_index(args.corpus or settings.corpus.path, settings)
        spec = TaskSpec(task=args.task, namespace=args.namespace, variables=parse_variables(args.var))
        gateway = build_gateway(settings)
    except INPUT_ERRORS as e:
        return report_input_error(e)

    reasoner = DeepReasoner(
        gateway,
        library=library,
        budgets=settings.budgets,
        settings=settings.kernel,
        corpus=index,
        top_k=settings.corpus.top_k,
        snippet_chars=settings.corpus.snippet_chars,
        timestamps=not args.no_timestamps,
    )
    result = reasoner.run(spec, root_id=args.root_id)

    config = {"task": args.task, "namespace": args.namespace, "corpus": args.corpus, **settings.snapshot()}
    trace_path = write_run(Path(settings.output_dir), args.task, result, config, not args.no_timestamps)

    if result.failure is not None:
        print(f"Backend error: {result.failure}")
        print(f"Trace: {trace_path}")
        return ExitStatus.BACKEND_ERROR
    if not result.finished:
        print(f"Run ended with status {result.status.value}")
        print(f"Trace: {trace_path}")
        return ExitStatus.TASK_FAILED

    print(format_answer(result.answer))
    print(f"Trace: {trace_path}")
    return ExitStatus.SUCCESS
