"""Settings management for DeepQnA using dependency injection pattern."""

import configparser
import os
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from deepqna.models.task import Budgets, PromptMode

# Load environment variables
load_dotenv()

CREDENTIAL_ENV = "DEEPQNA_API_KEY"
FALLBACK_CREDENTIAL_ENV = "OPENAI_API_KEY"

OUTPUT_DIR = Path("runs")
LOGS_DIR = Path("logs")

# Keys that must never appear in a config file
_CREDENTIAL_KEYS = {"api_key", "apikey", "key", "token", "secret", "password", "credential"}


class ConfigError(ValueError):
    """Invalid configuration or invocation input."""


class LogLevel(str, Enum):
    """Log levels."""

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


def read_credential() -> Optional[str]:
    """The endpoint credential, from the environment only."""
    return os.getenv(CREDENTIAL_ENV) or os.getenv(FALLBACK_CREDENTIAL_ENV) or None


def _split_list(v: Any) -> Any:
    if isinstance(v, str):
        return [part.strip() for part in v.split(",") if part.strip()]
    return v


class GatewaySettings(BaseModel):
    """Chat-completion endpoint settings."""

    model_config = ConfigDict(extra="forbid")

    base_url: str = Field("https://api.openai.com/v1", description="OpenAI-compatible endpoint URL")
    model: str = Field("gpt-4o-mini", description="Model name")
    temperature: float = Field(0.0, ge=0.0, description="Sampling temperature")
    max_new_tokens: int = Field(1024, ge=1, description="Completion token cap per request")
    stop_sequences: List[str] = Field(default_factory=lambda: ["</repl>"], description="Stop sequences")
    attempts: int = Field(3, ge=1, description="Attempts per request")
    backoff_seconds: List[float] = Field(
        default_factory=lambda: [1.0, 2.0, 4.0], description="Sleep before each retry"
    )
    timeout_seconds: float = Field(60.0, gt=0, description="Request timeout")
    max_in_flight: int = Field(16, ge=1, description="Global cap on concurrent requests")
    reasoning_delimiters: Tuple[str, str] = Field(
        ("<think>", "</think>"), description="Delimiters of reasoning text in completions"
    )
    mock_script: Optional[Path] = Field(None, description="Mock script; selects the mock backend")

    @field_validator("stop_sequences", "backoff_seconds", "reasoning_delimiters", mode="before")
    @classmethod
    def split_lists(cls, v: Any) -> Any:
        return _split_list(v)


class KernelSettings(BaseModel):
    """Reasoning kernel settings."""

    model_config = ConfigDict(extra="forbid")

    prompt_mode: PromptMode = Field(PromptMode.EXAMPLES, description="Prompt mode")
    default_namespace: Optional[str] = Field(None, description="Fallback example namespace")
    library: Optional[Path] = Field(None, description="Example library; None uses the bundled one")


class CorpusSettings(BaseModel):
    """Corpus and ranking settings."""

    model_config = ConfigDict(extra="forbid")

    path: Optional[Path] = Field(None, description="Corpus directory or records file")
    k1: float = Field(1.2, ge=0.0, description="BM25 term saturation")
    b: float = Field(0.75, ge=0.0, le=1.0, description="BM25 length normalization")
    title_weight: int = Field(2, ge=1, description="Title term repetition")
    top_k: int = Field(5, ge=1, description="Default number of hits")
    snippet_chars: int = Field(300, ge=1, description="Body characters shown per hit")


class HarnessSettings(BaseModel):
    """World generation and benchmark settings."""

    model_config = ConfigDict(extra="forbid")

    world_size: int = Field(50, ge=2, description="Persons per world")
    seed: int = Field(1, description="World and question seed")
    question_count: int = Field(100, ge=0, description="Questions per generated set")
    max_hops: int = Field(4, ge=1, le=5, description="Longest question chain")
    tolerance: float = Field(0.05, ge=0.0, description="Relaxed numeric tolerance")
    sweep_workers: int = Field(4, ge=1, description="Questions run concurrently")
    resample_attempts: int = Field(20, ge=1, description="Chain samples per question before skipping")


class Settings(BaseModel):
    """Application settings."""

    model_config = ConfigDict(extra="forbid")

    # Paths
    output_dir: Path = Field(default=OUTPUT_DIR)
    logs_dir: Path = Field(default=LOGS_DIR)

    # Logging
    log_level: LogLevel = Field(default=os.getenv("LOG_LEVEL", "INFO"), description="Log level", validate_default=True)

    gateway: GatewaySettings = Field(default_factory=GatewaySettings)
    budgets: Budgets = Field(default_factory=Budgets)
    kernel: KernelSettings = Field(default_factory=KernelSettings)
    corpus: CorpusSettings = Field(default_factory=CorpusSettings)
    harness: HarnessSettings = Field(default_factory=HarnessSettings)

    def snapshot(self) -> Dict[str, Any]:
        """JSON-safe copy for run directories; holds no credential."""
        return self.model_dump(mode="json")


_SECTIONS = ("gateway", "budgets", "kernel", "corpus", "harness")
_TOP_LEVEL = "paths"


def load_settings(path: Union[str, Path]) -> Settings:
    """
    Load settings from an INI-style config file.

    Sections are [paths], [gateway], [budgets], [kernel], [corpus] and [harness].
    The credential is never read from the file.

    Args:
        path: Config file path

    Returns:
        Settings: Validated settings

    Raises:
        ConfigError: If the file is missing, malformed, holds a credential, or has invalid values
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")

    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"Malformed config file {path}: {e}") from e

    data: Dict[str, Any] = {}
    for section in parser.sections():
        values = dict(parser.items(section))
        leaked = sorted(k for k in values if k.lower() in _CREDENTIAL_KEYS)
        if leaked:
            raise ConfigError(
                f"Credentials are not allowed in config files (found '{leaked[0]}' in [{section}]); "
                f"set {CREDENTIAL_ENV} instead"
            )
        if section == _TOP_LEVEL:
            data.update(values)
        elif section in _SECTIONS:
            data[section] = values
        else:
            raise ConfigError(f"Unknown config section [{section}] in {path}")

    try:
        return Settings(**data)
    except ValidationError as e:
        raise ConfigError(f"Invalid config file {path}: {e}") from e


@lru_cache()
def get_settings() -> Settings:
    """
    Get application settings singleton.

    Returns:
        Settings: Application settings
    """
    return Settings()
