"""Exact verification engine for reflection equation algebras and their quantum doubles."""

__version__ = "0.1.0"
