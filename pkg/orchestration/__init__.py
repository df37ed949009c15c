"""
Orchestration of the retrieval pipeline and its experiment drivers
"""

from .coordinator import RetrievalState, RetrievalWorkflow
from .grid import Task, format_grid_table, format_sweep_table, run_grid, run_topk_sweep

__all__ = [
    "RetrievalState",
    "RetrievalWorkflow",
    "Task",
    "format_grid_table",
    "format_sweep_table",
    "run_grid",
    "run_topk_sweep",
]
