"""Example library command for the CLI."""

import argparse
import logging

from deepqna.cli.common import ExitStatus, report_input_error
from deepqna.decompositions.store import BUNDLED_LIBRARY, FormatError, load_bundled_library, load_library_file

logger = logging.getLogger(__name__)


def configure_parser(parser: argparse.ArgumentParser) -> None:
    """
    Configure the argument parser for the examples command.

    Args:
        parser: The parser to configure
    """
    actions = parser.add_subparsers(dest="action", required=True)
    lint = actions.add_parser("lint", help="Validate an example library")
    lint.add_argument("path", nargs="?", help=f"Library file (default: the bundled {BUNDLED_LIBRARY})")


def execute(args: argparse.Namespace) -> int:
    """
    Execute the examples command.

    Args:
        args: The parsed arguments

    Returns:
        Exit code
    """
    try:
        library = load_library_file(args.path) if args.path else load_bundled_library()
    except (FileNotFoundError, FormatError) as e:
        return report_input_error(e)

    blocks = sum(example.code_blocks for example in library.examples)
    print(f"{len(library)} examples, {len(library.namespaces)} namespaces")
    for namespace, positions in library.index.items():
        print(f"  {namespace}: {len(positions)}")
    logger.info(f"Library has {blocks} code blocks")
    return ExitStatus.SUCCESS
