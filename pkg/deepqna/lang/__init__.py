"""The formal language: a closed, Python-shaped language for reasoning steps."""

from deepqna.lang.environment import Environment
from deepqna.lang.errors import ErrorKind, EvalError, FormalLanguageError, LexError, ParseError, Span
from deepqna.lang.hosts import FINAL_ANSWER, Effect, HostFunction, HostRegistry, final_answer_host
from deepqna.lang.interpreter import Interpreter, evaluate, evaluate_source
from deepqna.lang.nodes import Program
from deepqna.lang.observation import NO_OUTPUT, render_observation, truncate
from deepqna.lang.outcome import DEFAULT_STEP_BUDGET, EvalLimits, EvalOutcome, ErrorRecord, TerminalPayload
from deepqna.lang.parser import GRAMMAR_VERSION, Token, parse, tokenize
from deepqna.lang.source import CODE_CLOSE, CODE_OPEN, OBSERVATION_PREFIX, SourceBlock, SourceOrigin
from deepqna.lang.values import DescribedValue, HostHandle, type_name, type_summary

__all__ = [
    "CODE_CLOSE",
    "CODE_OPEN",
    "DEFAULT_STEP_BUDGET",
    "DescribedValue",
    "Effect",
    "Environment",
    "ErrorKind",
    "ErrorRecord",
    "EvalError",
    "EvalLimits",
    "EvalOutcome",
    "FINAL_ANSWER",
    "FormalLanguageError",
    "GRAMMAR_VERSION",
    "HostFunction",
    "HostHandle",
    "HostRegistry",
    "Interpreter",
    "LexError",
    "NO_OUTPUT",
    "OBSERVATION_PREFIX",
    "ParseError",
    "Program",
    "SourceBlock",
    "SourceOrigin",
    "Span",
    "TerminalPayload",
    "Token",
    "evaluate",
    "evaluate_source",
    "final_answer_host",
    "parse",
    "render_observation",
    "tokenize",
    "truncate",
    "type_name",
    "type_summary",
]
