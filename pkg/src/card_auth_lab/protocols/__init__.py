"""Executable state machines for the five reviewed smart-card schemes."""
from .base import guess_offline, handle_protocol_errors

__all__ = ["guess_offline", "handle_protocol_errors"]
