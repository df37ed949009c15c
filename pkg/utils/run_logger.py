"""
Run Logger
Captures a JSON trace of pipeline steps (ingest, associate, index, rank,
evaluate) for debugging and reproducibility. The trace never touches stdout.
"""

import json
import logging
import os
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


class RunLogger:
    """Logs pipeline steps of one run and saves them as JSON."""

    def __init__(self, log_dir: Optional[str] = None):
        """Initialize the run logger.

        Args:
            log_dir: Directory to store run logs; None keeps the trace in memory only
        """
        self.log_dir = Path(log_dir) if log_dir else None
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
        self.entries: List[Dict[str, Any]] = []
        self.run_id: Optional[str] = None

    @property
    def enabled(self) -> bool:
        return self.log_dir is not None

    def start_run(self, label: str, metadata: Optional[Dict[str, Any]] = None) -> str:
        """Start a new run trace.

        Args:
            label: Human-readable run label (e.g. "early/lm/binary")
            metadata: Input paths and parameters

        Returns:
            Run ID
        """
        self.run_id = datetime.now().strftime("%Y%m%d_%H%M%S_%f")
        self.entries = [{
            "timestamp": datetime.now().isoformat(),
            "type": "run",
            "label": label,
            "metadata": self._serialize_data(metadata or {}),
        }]
        logger.debug(f"Started run log: {self.run_id} ({label})")
        return self.run_id

    def log_step(self, stage: str, action: str,
                 input_data: Any = None, output_data: Any = None,
                 metadata: Optional[Dict[str, Any]] = None):
        """Log a pipeline step.

        Args:
            stage: Pipeline stage (e.g. "ingest", "rank")
            action: Action performed (e.g. "build_object_index")
            input_data: Input summary
            output_data: Output summary
            metadata: Additional metadata
        """
        self.entries.append({
            "timestamp": datetime.now().isoformat(),
            "stage": stage,
            "action": action,
            "input": self._serialize_data(input_data),
            "output": self._serialize_data(output_data),
            "metadata": metadata or {},
        })
        logger.debug(f"Logged {stage}.{action}")

    def log_error(self, stage: str, action: str, error: Exception):
        self.entries.append({
            "timestamp": datetime.now().isoformat(),
            "stage": stage,
            "action": action,
            "type": "error",
            "error": str(error),
            "error_type": type(error).__name__,
        })
        logger.debug(f"Logged error for {stage}.{action}: {error}")

    def end_run(self, summary: Optional[Dict[str, Any]] = None) -> Optional[Path]:
        """End the run and save the trace when a log directory is configured.

        Returns:
            Path of the saved log, or None
        """
        if not self.run_id:
            logger.warning("No active run to end")
            return None

        if summary:
            self.entries.append({
                "timestamp": datetime.now().isoformat(),
                "type": "summary",
                "content": self._serialize_data(summary),
            })

        log_file = None
        if self.log_dir is not None:
            log_file = self.log_dir / f"run_{self.run_id}.json"
            try:
                with open(log_file, "w", encoding="utf-8") as f:
                    json.dump({
                        "run_id": self.run_id,
                        "entries": self.entries,
                        "total_entries": len(self.entries),
                    }, f, indent=2, ensure_ascii=False)
                logger.info(f"Saved run log to {log_file}")
            except OSError as e:
                logger.error(f"Failed to save run log: {e}")
                log_file = None

        self.entries = []
        self.run_id = None
        return log_file

    def _serialize_data(self, data: Any) -> Any:
        """Make data JSON-safe, truncating large containers."""
        if data is None:
            return None

        if isinstance(data, dict):
            if len(data) > 50:
                return {
                    "_truncated": True,
                    "_count": len(data),
                    "_keys": [str(k) for k in list(data.keys())[:10]],
                }
            return {str(k): self._serialize_data(v) for k, v in data.items()}

        if isinstance(data, (list, tuple)):
            if len(data) > 50:
                return {
                    "_truncated": True,
                    "_count": len(data),
                    "_items": [self._serialize_data(item) for item in data[:10]],
                }
            return [self._serialize_data(item) for item in data]

        if isinstance(data, str):
            if len(data) > 5000:
                return data[:5000] + "... [truncated]"
            return data

        try:
            json.dumps(data)
            return data
        except (TypeError, ValueError):
            return str(data)


# Global instance
_run_logger = None


def get_run_logger(log_dir: Optional[str] = None) -> RunLogger:
    """Get the global run logger.

    Args:
        log_dir: Overrides FUSION_RUN_LOG_DIR; a directory other than the
            current logger's replaces the global instance

    Returns:
        RunLogger instance
    """
    global _run_logger
    if _run_logger is None:
        _run_logger = RunLogger(log_dir=log_dir or os.getenv("FUSION_RUN_LOG_DIR") or None)
    elif log_dir and _run_logger.log_dir != Path(log_dir):
        _run_logger = RunLogger(log_dir=log_dir)
    return _run_logger


def reset_run_logger() -> None:
    global _run_logger
    _run_logger = None
