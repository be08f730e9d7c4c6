"""Configuration for DeepQnA."""

from .settings import (
    CREDENTIAL_ENV,
    ConfigError,
    CorpusSettings,
    GatewaySettings,
    HarnessSettings,
    KernelSettings,
    LogLevel,
    Settings,
    get_settings,
    load_settings,
    read_credential,
)

__all__ = [
    "CREDENTIAL_ENV",
    "ConfigError",
    "CorpusSettings",
    "GatewaySettings",
    "HarnessSettings",
    "KernelSettings",
    "LogLevel",
    "Settings",
    "get_settings",
    "load_settings",
    "read_credential",
]
