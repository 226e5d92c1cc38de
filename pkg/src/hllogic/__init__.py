"""Executable semantics for Heyting-Lewis logic."""

__version__ = "0.1.0"
