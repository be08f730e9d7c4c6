"""Bundled example library and mock scripts."""
