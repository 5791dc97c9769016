"""Notebook documents, app-config headers, widget schemas, parameter binding."""

from .appconfig import AppConfig, InputSpec, extract_app_config, validate_app_config
from .binding import bind_parameters
from .document import Cell, NotebookDocument, parse_notebook, serialize_notebook
from .widgets import WidgetSchema, generate_widget_schema

__all__ = [
    "AppConfig",
    "Cell",
    "InputSpec",
    "NotebookDocument",
    "WidgetSchema",
    "bind_parameters",
    "extract_app_config",
    "generate_widget_schema",
    "parse_notebook",
    "serialize_notebook",
    "validate_app_config",
]
