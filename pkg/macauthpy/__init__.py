"""Keyless physical-layer authentication over a discrete memoryless MAC."""

__version__ = "0.1.0"
