"""
Utility functions and helpers
"""

from .errors import FusionRetrievalError
from .run_logger import RunLogger, get_run_logger

__all__ = [
    "FusionRetrievalError",
    "RunLogger",
    "get_run_logger",
]
