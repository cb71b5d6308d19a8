"""Jamming-aware LLR preprocessing for soft-detection decoders."""

__version__ = "0.1.0"
