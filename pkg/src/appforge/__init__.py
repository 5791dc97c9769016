"""appforge: governance platform turning reviewed notebooks into internal web apps."""

__version__ = "0.1.0"
