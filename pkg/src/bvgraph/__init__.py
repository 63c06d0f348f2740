"""Bounded-variation toolkit for functions on finite metric graphs."""

__version__ = "0.1.0"
