"""Preference-learned ranking and synthesis of sequential colormaps."""

__version__ = "0.1.0"
