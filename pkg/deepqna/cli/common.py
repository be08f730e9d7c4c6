"""Shared pieces of the CLI commands: exit statuses, config flags and loaders."""

import argparse
import json
import logging
from enum import IntEnum
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

from pydantic import ValidationError

from deepqna.config.settings import ConfigError, Settings, get_settings, load_settings
from deepqna.corpus.index import CorpusError, CorpusIndex, build_index
from deepqna.corpus.store import load_corpus
from deepqna.decompositions.store import FormatError, load_bundled_library, load_library_file
from deepqna.harness.records import RecordError
from deepqna.llm.gateway import LLMGateway, create_backend
from deepqna.llm.mock import MockScriptError
from deepqna.models.decomposition import ExampleLibrary
from deepqna.models.document import Document
from deepqna.models.task import PromptMode

logger = logging.getLogger(__name__)

# Errors that mean the invocation itself is wrong
INPUT_ERRORS = (
    ConfigError,
    FileNotFoundError,
    FormatError,
    MockScriptError,
    CorpusError,
    RecordError,
    ValidationError,
)


class ExitStatus(IntEnum):
    """Process exit codes."""

    SUCCESS = 0
    TASK_FAILED = 1
    CONFIG_ERROR = 2
    BACKEND_ERROR = 3


def add_config_arguments(parser: argparse.ArgumentParser) -> None:
    """
    Add the flags shared by commands that talk to a backend.

    Args:
        parser: The parser to configure
    """
    parser.add_argument("--config", help="Config file (INI sections [paths], [gateway], [budgets], ...)")
    parser.add_argument("--mock", help="Mock script file, or the name of a bundled script; selects the mock backend")
    parser.add_argument("--model", help="Model name for the endpoint")
    parser.add_argument("--base-url", help="OpenAI-compatible endpoint URL")
    parser.add_argument("--output-dir", "-o", help="Output directory")
    parser.add_argument("--library", help="Example library file (default: the bundled library)")
    parser.add_argument("--default-namespace", help="Namespace used when a thread's namespace has no examples")
    parser.add_argument(
        "--mode",
        choices=[m.value for m in PromptMode],
        help="Prompt mode (default: examples)",
    )
    parser.add_argument("--max-depth", type=int, help="Deepest recursive call (default: 4)")
    parser.add_argument("--max-turns", type=int, help="Model turns per thread (default: 12)")
    parser.add_argument("--max-total-tokens", type=int, help="Completion tokens per run (default: 200000)")
    parser.add_argument("--max-parallel", type=int, help="Concurrent children per batch (default: 8)")
    parser.add_argument(
        "--no-timestamps", action="store_true", help="Leave wall-clock timestamps out of trace files"
    )


def resolve_settings(args: argparse.Namespace) -> Settings:
    """
    Settings from the config file (or defaults) with command-line overrides.

    Raises:
        ConfigError: If the file or an override is invalid
    """
    settings = load_settings(args.config) if getattr(args, "config", None) else get_settings()
    gateway: Dict[str, Any] = {}
    if getattr(args, "mock", None):
        gateway["mock_script"] = args.mock
    if getattr(args, "model", None):
        gateway["model"] = args.model
    if getattr(args, "base_url", None):
        gateway["base_url"] = args.base_url

    budgets: Dict[str, Any] = {}
    for flag, field in (
        ("max_depth", "max_depth"),
        ("max_turns", "max_turns_per_thread"),
        ("max_total_tokens", "max_total_tokens"),
        ("max_parallel", "max_parallel_children"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            budgets[field] = value

    kernel: Dict[str, Any] = {}
    if getattr(args, "library", None):
        kernel["library"] = args.library
    if getattr(args, "default_namespace", None):
        kernel["default_namespace"] = args.default_namespace
    if getattr(args, "mode", None):
        kernel["prompt_mode"] = args.mode

    data = settings.model_dump()
    data["gateway"].update(gateway)
    data["budgets"].update(budgets)
    data["kernel"].update(kernel)
    if getattr(args, "output_dir", None):
        data["output_dir"] = args.output_dir
    try:
        return Settings.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid option: {e}") from e


def load_library(settings: Settings) -> ExampleLibrary:
    """The configured example library, or the bundled one."""
    if settings.kernel.library is not None:
        return load_library_file(settings.kernel.library, settings.kernel.default_namespace)
    return load_bundled_library(default_namespace=settings.kernel.default_namespace)


def load_index(path: Union[str, Path, None], settings: Settings) -> Optional[CorpusIndex]:
    """An index over the corpus at `path`, or None without a path."""
    if path is None:
        return None
    return index_documents(load_corpus(path), settings)


def index_documents(documents: Sequence[Document], settings: Settings) -> CorpusIndex:
    corpus = settings.corpus
    return build_index(documents, k1=corpus.k1, b=corpus.b, title_weight=corpus.title_weight)


def build_gateway(settings: Settings) -> LLMGateway:
    """
    Gateway over the configured backend; makes no request.

    Raises:
        ConfigError: If the endpoint credential is missing
        FileNotFoundError: If the mock script does not exist
        MockScriptError: If the mock script is malformed
    """
    backend = create_backend(settings.gateway)
    logger.info(f"Using the {backend.name} backend")
    return LLMGateway(backend, settings.gateway)


def write_json(path: Path, data: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path


def report_input_error(error: Exception) -> int:
    """Print an invocation error and return the config-error status."""
    print(f"Error: {error}")
    logger.error(f"Invalid invocation: {error}")
    return ExitStatus.CONFIG_ERROR
