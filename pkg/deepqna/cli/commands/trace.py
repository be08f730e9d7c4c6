"""Trace command for the CLI."""

import argparse
import json
import logging

from deepqna.cli.common import ExitStatus, report_input_error
from deepqna.kernel.trace import filter_events, read_trace, trace_usage
from deepqna.models.trace import EventKind, TraceEvent

logger = logging.getLogger(__name__)

# Payload fields shown per event kind
_SUMMARY_FIELDS = {
    EventKind.THREAD_START: ("namespace", "task"),
    EventKind.MODEL_TURN: ("turn", "code", "malformed"),
    EventKind.EXECUTION: ("printed", "error"),
    EventKind.OBSERVATION: ("text",),
    EventKind.CHILD_SPAWN: ("child_id", "namespace", "task"),
    EventKind.BATCH_DISPATCH: ("children",),
    EventKind.FINAL_ANSWER: ("answer",),
    EventKind.ERROR: ("reason",),
    EventKind.BUDGET_EXHAUSTED: ("reason",),
}


def configure_parser(parser: argparse.ArgumentParser) -> None:
    """
    Configure the argument parser for the trace command.

    Args:
        parser: The parser to configure
    """
    actions = parser.add_subparsers(dest="action", required=True)
    show = actions.add_parser("show", help="Print a trace file and its usage table")
    show.add_argument("path", help="Trace file")
    show.add_argument("--thread", "-t", help="Only events of this thread")
    show.add_argument("--kind", "-k", choices=[k.value for k in EventKind], help="Only events of this kind")
    show.add_argument("--depth", "-d", type=int, help="Only events of threads at this depth")
    show.add_argument("--width", type=int, default=120, help="Characters per line (default: 120)")


def format_event(event: TraceEvent, width: int = 120) -> str:
    """One line per event: thread, sequence number, kind and a payload summary."""
    fields = _SUMMARY_FIELDS.get(event.kind, ())
    summary = " ".join(
        f"{name}={json.dumps(event.payload[name])}" for name in fields if event.payload.get(name) is not None
    )
    line = f"{event.thread_id:<16} {event.seq:>4} {event.kind.value:<17} {summary}"
    return line if len(line) <= width else line[: max(width - 3, 0)] + "..."


def execute(args: argparse.Namespace) -> int:
    """
    Execute the trace command.

    Args:
        args: The parsed arguments

    Returns:
        Exit code
    """
    try:
        events = read_trace(args.path)
    except (OSError, ValueError) as e:
        return report_input_error(e)

    kind = EventKind(args.kind) if args.kind else None
    for event in filter_events(events, thread_id=args.thread, kind=kind, depth=args.depth):
        print(format_event(event, args.width))
    print()
    print(trace_usage(events).render_table())
    return ExitStatus.SUCCESS
