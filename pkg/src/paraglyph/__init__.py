"""Parametric glyph compiler and variable-font master pipeline."""

__version__ = "0.1.0"
