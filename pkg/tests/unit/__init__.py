"""Unit tests for DeepQnA."""
