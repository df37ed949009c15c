"""
Retrieval model kernels (query likelihood with Jelinek-Mercer smoothing, BM25)
"""

from .term_scoring import (
    ModelParams,
    RetrievalModel,
    bm25_term_score,
    idf,
    lm_term_score,
)

__all__ = [
    "ModelParams",
    "RetrievalModel",
    "bm25_term_score",
    "idf",
    "lm_term_score",
]
