"""
Command-line interface: fusion-rank
"""

from .runner import build_parser, main

__all__ = ["build_parser", "main"]
