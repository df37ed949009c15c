"""
Run configuration.

A run is one point of the fusion x model x association grid:

    fusion      early | late
    model       lm (Jelinek-Mercer, lambda=0.1) | bm25 (k1=1.2, b=0.75)
    assoc       binary | uniform | explicit

Ranking parameters come only from built-in defaults and command-line flags.
Ambient settings (log level, run-log directory, query concurrency) are read
from the environment, after loading `.env`:

    FUSION_LOG_LEVEL         INFO
    FUSION_RUN_LOG_DIR       unset (run logs disabled)
    FUSION_MAX_CONCURRENCY   8
"""

from __future__ import annotations

import logging
import os
import sys
from enum import Enum
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from indexing.associations import AssociationMode
from rankers.late_fusion import DEFAULT_TOPK_DOCS, AggregationSpec, AggregationTransform
from scoring.term_scoring import ModelParams, RetrievalModel
from utils.errors import ConfigError

load_dotenv()

logger = logging.getLogger(__name__)

# ---------------------------------------------------------------------------
# Ambient settings
# ---------------------------------------------------------------------------

DEFAULT_MAX_CONCURRENCY = 8


def _env_positive_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        logger.warning(f"{name}={raw!r} is not a positive integer; using {default}")
        return default
    return value


LOG_LEVEL = os.getenv("FUSION_LOG_LEVEL", "INFO").upper()
RUN_LOG_DIR = os.getenv("FUSION_RUN_LOG_DIR") or None
MAX_CONCURRENCY = _env_positive_int("FUSION_MAX_CONCURRENCY", DEFAULT_MAX_CONCURRENCY)

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

# ---------------------------------------------------------------------------
# Ranking defaults
# ---------------------------------------------------------------------------

DEFAULT_OUTPUT_DEPTH = 1000
DEFAULT_RUN_TAG = "fusion"


class FusionStrategy(str, Enum):
    EARLY = "early"
    LATE = "late"


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    fusion: FusionStrategy = FusionStrategy.EARLY
    model: RetrievalModel = RetrievalModel.LM
    assoc: AssociationMode = AssociationMode.BINARY
    params: ModelParams = Field(default_factory=ModelParams)
    transform: AggregationTransform = AggregationTransform.RAW
    top_k_docs: int = Field(DEFAULT_TOPK_DOCS, ge=1)
    output_depth: int = Field(DEFAULT_OUTPUT_DEPTH, ge=1)
    run_tag: str = DEFAULT_RUN_TAG

    @field_validator("run_tag")
    @classmethod
    def _tag_is_token(cls, v: str) -> str:
        if not v or any(c.isspace() for c in v):
            raise ValueError("run tag must be non-empty and contain no whitespace")
        return v

    @property
    def aggregation(self) -> AggregationSpec:
        return AggregationSpec(
            transform=self.transform, top_k=self.top_k_docs, mode=self.assoc
        )

    @property
    def label(self) -> str:
        return f"{self.fusion.value}/{self.model.value}/{self.assoc.value}"


def create_run_config(
    fusion: str = FusionStrategy.EARLY.value,
    model: str = RetrievalModel.LM.value,
    assoc: str = AssociationMode.BINARY.value,
    lambda_: Optional[float] = None,
    k1: Optional[float] = None,
    b: Optional[float] = None,
    transform: str = AggregationTransform.RAW.value,
    top_k_docs: int = DEFAULT_TOPK_DOCS,
    output_depth: int = DEFAULT_OUTPUT_DEPTH,
    run_tag: str = DEFAULT_RUN_TAG,
) -> RunConfig:
    """Build a validated RunConfig; unset model parameters keep their defaults.

    Raises:
        ConfigError: if any value is out of range
    """
    overrides = {
        name: value
        for name, value in (("lambda", lambda_), ("k1", k1), ("b", b))
        if value is not None
    }
    try:
        return RunConfig(
            fusion=fusion,
            model=model,
            assoc=assoc,
            params=ModelParams(**overrides),
            transform=transform,
            top_k_docs=top_k_docs,
            output_depth=output_depth,
            run_tag=run_tag,
        )
    except ValidationError as e:
        errors = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"invalid run configuration: {errors}") from e


def configure_logging(level: Optional[str] = None) -> None:
    """Send diagnostics to stderr; stdout is reserved for results."""
    logging.basicConfig(
        level=(level or LOG_LEVEL),
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )
