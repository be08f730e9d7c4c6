"""CLI module for deepqna."""

from deepqna.cli.main import main
