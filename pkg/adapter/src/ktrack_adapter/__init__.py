"""Reference adapter for the ktrack external-tracker stdio protocol."""

from .serve import MockConfig, serve, serve_mock

__all__ = ["MockConfig", "serve", "serve_mock"]

__version__ = "0.1.0"
