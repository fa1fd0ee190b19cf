"""Conversational visual analysis toolkit.

Profile a CSV, type analytic questions in plain language, get charts
back, and let the engine suggest what to ask next.
"""

__version__ = "0.1.0"

from .profiling import Dataset, Kind, load_dataset, load_fixture

__all__ = ["Dataset", "Kind", "load_dataset", "load_fixture", "__version__"]
