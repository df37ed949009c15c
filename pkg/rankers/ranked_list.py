"""
Ranked result lists and TREC run-line serialization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

RUN_SCORE_FORMAT = "{:.6f}"


def sort_scored(pairs: Iterable[tuple[str, float]]) -> list[tuple[str, float]]:
    """Score descending, ties broken by ascending id."""
    return sorted(pairs, key=lambda p: (-p[1], p[0]))


@dataclass(frozen=True)
class RankedList:
    """Ordered (id, score) pairs under the deterministic tie-break rule."""

    entries: tuple[tuple[str, float], ...] = ()

    @classmethod
    def from_scores(
        cls, scores: dict[str, float], cutoff: Optional[int] = None
    ) -> "RankedList":
        ranked = sort_scored(scores.items())
        if cutoff is not None:
            ranked = ranked[:cutoff]
        return cls(tuple(ranked))

    @property
    def ids(self) -> list[str]:
        return [oid for oid, _ in self.entries]

    def score_of(self, object_id: str) -> Optional[float]:
        for oid, score in self.entries:
            if oid == object_id:
                return score
        return None

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[str, float]]:
        return iter(self.entries)

    def to_run_lines(
        self, query_id: str, run_tag: str, depth: Optional[int] = None
    ) -> list[str]:
        """``query_id Q0 object_id rank score run_tag``, rank from 1."""
        entries = self.entries if depth is None else self.entries[:depth]
        return [
            f"{query_id} Q0 {oid} {rank} {RUN_SCORE_FORMAT.format(score)} {run_tag}"
            for rank, (oid, score) in enumerate(entries, start=1)
        ]
