"""Refactoring-aware operation-based three-way merging for MJ programs."""

__version__ = "0.1.0"
