"""HTTP service wrapping the streaming engine."""
from .app import app, create_app

__all__ = ["app", "create_app"]
