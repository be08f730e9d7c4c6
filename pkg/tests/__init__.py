"""Tests for DeepQnA."""
