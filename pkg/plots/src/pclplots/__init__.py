"""Figure regeneration from simulator metrics.csv / summary.json outputs."""

from .figures import (
    FigureSpec,
    SchemaMismatch,
    SpecError,
    load_spec,
    read_metrics,
    read_summary,
    render,
    spec_from_dict,
)

__all__ = [
    "FigureSpec",
    "SchemaMismatch",
    "SpecError",
    "load_spec",
    "read_metrics",
    "read_summary",
    "render",
    "spec_from_dict",
]

__version__ = "0.1.0"
