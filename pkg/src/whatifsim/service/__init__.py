"""FastAPI service exposing scene creation, simulation, and what-if answering."""

from .app import SessionStore, create_app

__all__ = ["SessionStore", "create_app"]
