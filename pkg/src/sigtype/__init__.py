"""Predict Python function parameter and return types from natural-language context."""

__version__ = "0.1.0"
