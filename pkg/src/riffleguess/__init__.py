"""Optimal guessing of a once-riffled deck with complete feedback."""

__version__ = "0.1.0"
