"""LLM-led semi-structured interviews with post-interview privacy editing."""

__version__ = "0.1.0"
