"""
Term scoring kernels shared by early and late fusion.

Every kernel works over an abstract "unit": a document when ranking
documents, a pseudo-object when ranking objects. Frequencies are real-valued
because uniform associations produce fractional pseudo-frequencies.

Logarithms are natural logarithms throughout.
"""

from __future__ import annotations

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from utils.errors import UndefinedIdfError, UnsmoothableTermError

DEFAULT_LAMBDA = 0.1
DEFAULT_K1 = 1.2
DEFAULT_B = 0.75


class RetrievalModel(str, Enum):
    LM = "lm"
    BM25 = "bm25"


class ModelParams(BaseModel):
    """Parameters of the underlying retrieval model.

    `lambda_` is exposed under the alias ``lambda`` so configs can be built
    from plain dictionaries (``ModelParams(**{"lambda": 0.2})``).
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lambda_: float = Field(DEFAULT_LAMBDA, ge=0.0, le=1.0, alias="lambda")
    k1: float = Field(DEFAULT_K1, ge=0.0)
    b: float = Field(DEFAULT_B, ge=0.0, le=1.0)


def lm_term_score(
    freq: float, unit_length: float, p_background: float, lambda_: float
) -> float:
    """Jelinek-Mercer smoothed log probability of one query term.

    Args:
        freq: (Pseudo) frequency of the term in the unit
        unit_length: Length of the unit, must be positive
        p_background: Background probability P(t)
        lambda_: Smoothing weight of the background model

    Returns:
        ln((1 - lambda) * freq / unit_length + lambda * P(t))

    Raises:
        UnsmoothableTermError: if the smoothed probability is zero
    """
    if unit_length <= 0:
        raise ValueError(f"unit length must be positive, got {unit_length}")
    prob = (1.0 - lambda_) * (freq / unit_length) + lambda_ * p_background
    if prob <= 0.0:
        raise UnsmoothableTermError(
            f"term unseen in unit and collection (freq={freq}, P(t)={p_background})"
        )
    return math.log(prob)


def bm25_term_score(
    freq: float,
    unit_length: float,
    avg_length: float,
    idf: float,
    k1: float,
    b: float,
) -> float:
    """BM25 contribution of one query term; 0 when the term is absent."""
    if avg_length <= 0:
        raise ValueError(f"average length must be positive, got {avg_length}")
    if freq == 0:
        return 0.0
    norm = k1 * (1.0 - b + b * unit_length / avg_length)
    return idf * freq * (k1 + 1.0) / (freq + norm)


def idf(num_units: int, unit_freq: int) -> float:
    """ln(N / n_t).

    Raises:
        UndefinedIdfError: if the term occurs in no unit
    """
    if unit_freq <= 0:
        raise UndefinedIdfError(f"term occurs in none of {num_units} units")
    return math.log(num_units / unit_freq)
