"""Command-line interface."""

from robust_xbar.cli.main import cli, main

__all__ = ['cli', 'main']
