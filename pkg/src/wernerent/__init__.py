"""Entanglement measures of Werner states and numerical checks of their closed forms."""

__version__ = "0.1.0"
