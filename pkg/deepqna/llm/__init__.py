"""Completion gateway, backends and usage accounting."""

from deepqna.llm.base import Backend
from deepqna.llm.errors import BackendRefusal, GatewayError, MockMiss, TransientBackendError, TransportError
from deepqna.llm.gateway import LLMGateway, create_backend
from deepqna.llm.ledger import LEDGER_FIELDS, UsageLedger, build_usage_report, combine_reports, usage_report
from deepqna.llm.mock import (
    MOCK_EXTENSION,
    MockBackend,
    MockScript,
    MockScriptError,
    Rule,
    load_bundled_script,
    load_mock_script,
    parse_mock_script,
    resolve_mock_script,
)
from deepqna.llm.openai_backend import OpenAIBackend

__all__ = [
    "Backend",
    "BackendRefusal",
    "GatewayError",
    "LEDGER_FIELDS",
    "LLMGateway",
    "MOCK_EXTENSION",
    "MockBackend",
    "MockMiss",
    "MockScript",
    "MockScriptError",
    "OpenAIBackend",
    "Rule",
    "TransientBackendError",
    "TransportError",
    "UsageLedger",
    "build_usage_report",
    "combine_reports",
    "create_backend",
    "load_bundled_script",
    "load_mock_script",
    "parse_mock_script",
    "resolve_mock_script",
    "usage_report",
]
