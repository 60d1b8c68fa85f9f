"""Optimal steering for a pair of planar unit-speed vehicles."""

from dubinspair._core import __version__, serialize, solve, validate

__all__ = ["__version__", "serialize", "solve", "validate"]
