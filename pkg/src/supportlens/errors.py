"""Shared exception types mapped onto API error codes by the server."""
from __future__ import annotations


class NotFoundError(LookupError):
    """A referenced id (post, comment, highlight, board, ...) does not exist."""


class ValidationError(ValueError):
    """Input rejected before any state change."""


class StaleViewError(RuntimeError):
    """A zoom path addresses a node no longer present in the filtered view."""


class ProviderError(RuntimeError):
    """An external provider (embedding service, LLM endpoint) failed."""

    def __init__(self, provider: str, message: str):
        super().__init__(f"{provider}: {message}")
        self.provider = provider
