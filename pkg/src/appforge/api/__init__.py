"""HTTP surface: authenticated FastAPI service over the platform."""

from .app import ACCESS_TABLE, create_app

__all__ = ["ACCESS_TABLE", "create_app"]
