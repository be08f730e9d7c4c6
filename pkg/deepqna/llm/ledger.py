"""Append-only token usage ledger and its summary report."""

import json
import logging
import threading
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Dict, Iterable, List, Tuple, Union

from deepqna.models.messages import Channel, LedgerEntry, Usage
from deepqna.models.report import ThreadUsage, UsageReport

logger = logging.getLogger(__name__)

# Field names of exported ledger records
LEDGER_FIELDS = (
    "thread_label",
    "channel",
    "prompt_tokens",
    "completion_tokens",
    "reasoning_tokens",
    "approximate",
    "timestamp",
)


class UsageLedger:
    """Thread-safe append-only record of completions."""

    def __init__(self, entries: Iterable[LedgerEntry] = ()):
        self._entries: List[LedgerEntry] = list(entries)
        self._lock = threading.Lock()

    def record(
        self,
        thread_label: str,
        usage: Usage,
        channel: Channel = Channel.MODEL,
        approximate: bool = False,
    ) -> LedgerEntry:
        entry = LedgerEntry(thread_label=thread_label, channel=channel, usage=usage, approximate=approximate)
        with self._lock:
            self._entries.append(entry)
        return entry

    @property
    def entries(self) -> Tuple[LedgerEntry, ...]:
        with self._lock:
            return tuple(self._entries)

    def total(self) -> Usage:
        total = Usage()
        for entry in self.entries:
            total = total + entry.usage
        return total

    def thread_total(self, thread_label: str) -> Usage:
        total = Usage()
        for entry in self.entries:
            if entry.thread_label == thread_label:
                total = total + entry.usage
        return total

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def to_records(self) -> List[Dict[str, object]]:
        """One flat JSON-safe record per entry."""
        return [
            {
                "thread_label": e.thread_label,
                "channel": e.channel.value,
                "prompt_tokens": e.usage.prompt_tokens,
                "completion_tokens": e.usage.completion_tokens,
                "reasoning_tokens": e.usage.reasoning_tokens,
                "approximate": e.approximate,
                "timestamp": e.timestamp.isoformat(),
            }
            for e in self.entries
        ]

    def export_jsonl(self, path: Union[str, Path]) -> Path:
        """Write the ledger as line-delimited JSON."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as f:
            for record in self.to_records():
                f.write(json.dumps(record) + "\n")
        logger.debug(f"Exported {len(self)} ledger entries to {path}")
        return path


def _mean(total: int, count: int) -> str:
    if count == 0:
        return "0.00"
    return str((Decimal(total) / Decimal(count)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def build_usage_report(per_thread: Iterable[ThreadUsage], approximate: bool = False) -> UsageReport:
    """
    A report from per-thread totals with distinct labels.

    Args:
        per_thread: Thread totals, in the order they should be listed
        approximate: Whether any count was estimated

    Returns:
        UsageReport: Grand totals and 2-decimal per-thread means
    """
    threads = list(per_thread)
    total = Usage()
    for entry in threads:
        total = total + entry.usage
    return UsageReport(
        per_thread=threads,
        total=total,
        thread_count=len(threads),
        mean_completion_tokens=_mean(total.completion_tokens, len(threads)),
        mean_reasoning_tokens=_mean(total.reasoning_tokens, len(threads)),
        max_thread_completion_tokens=max((t.usage.completion_tokens for t in threads), default=0),
        approximate=approximate,
    )


def _accumulate(per_thread: Dict[str, ThreadUsage], label: str, usage: Usage, requests: int) -> None:
    current = per_thread.get(label)
    if current is not None:
        usage = current.usage + usage
        requests = current.requests + requests
    per_thread[label] = ThreadUsage(thread_label=label, usage=usage, requests=requests)


def usage_report(ledger: Union[UsageLedger, Iterable[LedgerEntry]]) -> UsageReport:
    """
    Summarize a ledger.

    Args:
        ledger: A ledger, or its entries

    Returns:
        UsageReport: Exact per-thread and grand totals, with 2-decimal means
    """
    entries = ledger.entries if isinstance(ledger, UsageLedger) else tuple(ledger)
    per_thread: Dict[str, ThreadUsage] = {}
    for entry in entries:
        _accumulate(per_thread, entry.thread_label, entry.usage, 1)
    return build_usage_report(per_thread.values(), any(e.approximate for e in entries))


def combine_reports(reports: Iterable[UsageReport]) -> UsageReport:
    """
    Merge reports of independent runs.

    Threads that share a label across reports are summed together.
    """
    per_thread: Dict[str, ThreadUsage] = {}
    approximate = False
    for report in reports:
        approximate = approximate or report.approximate
        for entry in report.per_thread:
            _accumulate(per_thread, entry.thread_label, entry.usage, entry.requests)
    return build_usage_report(per_thread.values(), approximate)
