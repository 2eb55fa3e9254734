"""Static figure rendering for ris-ee-lab result CSVs."""

from .render import DEFAULT_STYLES, KINDS, SCHEMA_VERSION, FigureSpec, Series, aggregate, read_rows, render

__all__ = [
    "DEFAULT_STYLES",
    "KINDS",
    "SCHEMA_VERSION",
    "FigureSpec",
    "Series",
    "aggregate",
    "read_rows",
    "render",
]
