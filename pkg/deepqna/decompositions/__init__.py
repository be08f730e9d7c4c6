"""Namespaced decomposition examples and system prompt rendering."""

from deepqna.decompositions.prompt import VariableDoc, render_example, render_system_prompt
from deepqna.decompositions.store import (
    BUNDLED_LIBRARY,
    LIBRARY_EXTENSION,
    FormatError,
    load_bundled_library,
    load_library,
    load_library_file,
    render_library,
    select,
)

__all__ = [
    "BUNDLED_LIBRARY",
    "FormatError",
    "LIBRARY_EXTENSION",
    "VariableDoc",
    "load_bundled_library",
    "load_library",
    "load_library_file",
    "render_example",
    "render_library",
    "render_system_prompt",
    "select",
]
