"""Command modules for the CLI."""

from deepqna.cli.commands import bench, examples, run, trace, world
