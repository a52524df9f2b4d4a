"""
Partition of the nodes into contexts.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.core.errors import DataError


def compact_labels(labels: Sequence[int]) -> np.ndarray:
    """Relabel to contiguous ids 0..K-1 in order of first occurrence"""
    labels = np.asarray(labels)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first)] = np.arange(len(first))
    return rank[inverse.ravel()]


@dataclass(frozen=True, eq=False)
class Partition:
    """
    Assignment of every node to a context id in 0..K-1.

    Ids are canonical (numbered by first occurrence), so two partitions that
    differ only by a relabeling have equal assignments.
    """
    assignment: np.ndarray
    score: Optional[float] = None
    time: Optional[float] = None

    def __post_init__(self):
        assignment = compact_labels(self.assignment) if len(self.assignment) else np.zeros(0, np.int64)
        assignment.setflags(write=False)
        object.__setattr__(self, "assignment", assignment)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(np.arange(n))

    @classmethod
    def all_in_one(cls, n: int) -> "Partition":
        return cls(np.zeros(n, dtype=np.int64))

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]], n: Optional[int] = None) -> "Partition":
        n = n if n is not None else sum(len(b) for b in blocks)
        labels = np.full(n, -1, dtype=np.int64)
        for c, block in enumerate(blocks):
            labels[list(block)] = c
        if np.any(labels < 0):
            raise DataError("blocks do not cover every node")
        return cls(labels)

    @property
    def node_count(self) -> int:
        return len(self.assignment)

    @property
    def num_contexts(self) -> int:
        return int(self.assignment.max()) + 1 if len(self.assignment) else 0

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.num_contexts)

    def blocks(self) -> List[np.ndarray]:
        return [np.flatnonzero(self.assignment == c) for c in range(self.num_contexts)]

    def indicator(self) -> np.ndarray:
        """Dense N x K characteristic matrix H"""
        h = np.zeros((self.node_count, self.num_contexts))
        h[np.arange(self.node_count), self.assignment] = 1.0
        return h

    def with_score(self, score: Optional[float], time: Optional[float] = None) -> "Partition":
        return Partition(self.assignment, score=score, time=self.time if time is None else time)

    def same_as(self, other: "Partition") -> bool:
        return np.array_equal(self.assignment, other.assignment)

    def to_dict(self, node_ids: Optional[Sequence[str]] = None) -> Dict[str, Any]:
        ids = list(node_ids) if node_ids is not None else [str(i) for i in range(self.node_count)]
        return {
            "time": self.time,
            "score": self.score,
            "num_contexts": self.num_contexts,
            "assignment": {node: int(c) for node, c in zip(ids, self.assignment)},
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.same_as(other)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Partition(K={self.num_contexts}, N={self.node_count}, score={self.score})"
