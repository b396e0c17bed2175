"""Procedural window-scene generator with a verifiable software renderer."""

__version__ = "0.1.0"
