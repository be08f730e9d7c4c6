"""Main entry point for the DeepQnA CLI."""

import argparse
import logging
import sys
from typing import List, Optional

from deepqna.cli.commands import bench, examples, run, trace, world
from deepqna.cli.common import ExitStatus
from deepqna.config import get_settings

logger = logging.getLogger("deepqna.cli")

LOG_FILE_NAME = "deepqna.log"


def configure_logging() -> None:
    """Log to the console and to the log file under the configured logs directory."""
    settings = get_settings()
    settings.logs_dir.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, settings.log_level.value),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.FileHandler(settings.logs_dir / LOG_FILE_NAME),
            logging.StreamHandler(),
        ],
    )


def main(args: Optional[List[str]] = None) -> int:
    """
    Main entry point for the CLI.

    Args:
        args: Command line arguments (uses sys.argv if None)

    Returns:
        Exit code
    """
    parser = argparse.ArgumentParser(description="DeepQnA - recursive reasoning over formal code and sub-agents")
    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    commands = {
        "run": (run, "Run one task with the reasoning kernel"),
        "bench": (bench, "Benchmark a scaffold on a question set"),
        "world": (world, "Synthetic world commands"),
        "examples": (examples, "Example library commands"),
        "trace": (trace, "Trace file commands"),
    }
    for name, (module, help_text) in commands.items():
        module.configure_parser(subparsers.add_parser(name, help=help_text))

    try:
        parsed_args = parser.parse_args(args)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 on --help
        return ExitStatus.SUCCESS if e.code == 0 else ExitStatus.CONFIG_ERROR

    if parsed_args.command is None:
        parser.print_help()
        return ExitStatus.CONFIG_ERROR

    configure_logging()
    module, _ = commands[parsed_args.command]
    return int(module.execute(parsed_args))


if __name__ == "__main__":
    sys.exit(main())
