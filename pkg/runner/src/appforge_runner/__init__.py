"""Reference runner: executes bound notebooks under wire protocol v1."""

__version__ = "0.1.0"
