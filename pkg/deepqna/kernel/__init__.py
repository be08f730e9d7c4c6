"""The reasoning kernel: threads, turns, host functions and traces."""

from deepqna.kernel.agent import ROOT_ID, DeepReasoner
from deepqna.kernel.errors import HostFailure, KernelError, MalformedTurn
from deepqna.kernel.hosts import corpus_hosts, error_sentinel
from deepqna.kernel.threads import ThreadContext, TokenBudget
from deepqna.kernel.trace import (
    TraceSink,
    filter_events,
    json_safe,
    read_trace,
    serialize_trace,
    trace_usage,
    write_trace,
)
from deepqna.kernel.turns import ParsedTurn, parse_turn

__all__ = [
    "DeepReasoner",
    "HostFailure",
    "KernelError",
    "MalformedTurn",
    "ParsedTurn",
    "ROOT_ID",
    "ThreadContext",
    "TokenBudget",
    "TraceSink",
    "corpus_hosts",
    "error_sentinel",
    "filter_events",
    "json_safe",
    "parse_turn",
    "read_trace",
    "serialize_trace",
    "trace_usage",
    "write_trace",
]
