"""DeepQnA recursive meta-reasoning runtime."""

__version__ = "0.1.0"
