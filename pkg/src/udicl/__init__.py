"""Syntactically augmented in-context translation prompts for Coptic-to-English MT."""

__version__ = "0.1.0"
