"""
Two-standard-deviation outlier rule on a concentration profile.

A node is anomalous at time t when c_u(t) >= mean(c(t)) + 2 std(c(t)).
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.anomaly.concentration import ConcentrationProfile
from src.core.errors import ShapeError
from src.stability.partition import Partition

THRESHOLD_STDS = 2.0
# relative slack so that values equal to the threshold up to rounding still flag
TIE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class AnomalyReport:
    """
    Ranked concentrations, threshold and flagged nodes at one time.

    `contexts`, when present, maps every node to its context id at the same time.
    """
    time: float
    scores: np.ndarray
    ranking: np.ndarray
    threshold: float
    flagged: np.ndarray
    contexts: Optional[np.ndarray] = None

    @property
    def flagged_mask(self) -> np.ndarray:
        mask = np.zeros(len(self.scores), dtype=bool)
        mask[self.flagged] = True
        return mask

    def with_contexts(self, partition: Partition) -> "AnomalyReport":
        if partition.node_count != len(self.scores):
            raise ShapeError("partition size differs from report size")
        return AnomalyReport(self.time, self.scores, self.ranking, self.threshold,
                             self.flagged, contexts=partition.assignment.copy())

    def records(self, node_ids: Sequence[str]) -> List[Dict[str, Any]]:
        """One record per node, in ranking order"""
        rank = np.empty(len(self.ranking), dtype=np.int64)
        rank[self.ranking] = np.arange(1, len(self.ranking) + 1)
        mask = self.flagged_mask
        out = []
        for u in self.ranking:
            out.append({
                "id": node_ids[u],
                "score": float(self.scores[u]),
                "rank": int(rank[u]),
                "flagged": bool(mask[u]),
                "context": None if self.contexts is None else int(self.contexts[u]),
            })
        return out

    def to_dict(self, node_ids: Sequence[str]) -> Dict[str, Any]:
        return {
            "time": self.time,
            "threshold": self.threshold,
            "num_flagged": int(len(self.flagged)),
            "nodes": self.records(node_ids),
        }

    def to_frame(self, node_ids: Sequence[str]) -> pd.DataFrame:
        frame = pd.DataFrame(self.records(node_ids))
        frame["context"] = frame["context"].astype("Int64")
        return frame


def detect(profile: ConcentrationProfile) -> AnomalyReport:
    """
    Apply the threshold c_u >= mean + 2 std (inclusive).

    Ranking is by descending concentration, ties by ascending node index. A
    profile with zero spread flags nothing.
    """
    scores = np.asarray(profile.values, dtype=float)
    n = len(scores)
    ranking = np.lexsort((np.arange(n), -scores))
    threshold = profile.mean + THRESHOLD_STDS * profile.std

    spread = profile.std
    if spread <= 1e-15 * max(1.0, abs(profile.mean)):
        flagged = np.zeros(0, dtype=np.int64)
    else:
        hit = (scores >= threshold) | np.isclose(scores, threshold, rtol=TIE_RTOL, atol=0.0)
        flagged = np.flatnonzero(hit)
    return AnomalyReport(
        time=profile.time,
        scores=scores,
        ranking=ranking,
        threshold=float(threshold),
        flagged=flagged,
    )


@dataclass
class OutlierTrack:
    """Scales at which one node is flagged, with its context at each"""
    node: str
    times: List[float] = field(default_factory=list)
    contexts: List[Optional[int]] = field(default_factory=list)
    scores: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.node, "times": self.times, "contexts": self.contexts,
                "scores": self.scores}


def track_outliers(reports: Sequence[AnomalyReport], node_ids: Sequence[str]) -> List[OutlierTrack]:
    """
    Follow every node that is flagged at some scale across the given reports
    (ascending time). Nodes appear in order of first flagging, then index.
    """
    tracks: Dict[int, OutlierTrack] = {}
    for report in sorted(reports, key=lambda r: r.time):
        for u in report.flagged:
            track = tracks.setdefault(int(u), OutlierTrack(node=node_ids[int(u)]))
            track.times.append(report.time)
            track.contexts.append(None if report.contexts is None else int(report.contexts[u]))
            track.scores.append(float(report.scores[u]))
    return list(tracks.values())
