"""
Scale scanning and selection.

A scan runs the context search on a grid of diffusion times and records, per
time, the best partition, its number of contexts K(t), the ensemble
variation of information VI(t) and the node concentrations; VI(t, t') then
compares the best partitions of every pair of times. Relevant scales are
times where VI(t) dips inside a plateau of low VI(t, t').
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from sklearn.metrics.cluster import contingency_matrix

from src.anomaly.concentration import ConcentrationProfile, concentration_profile
from src.core.errors import AnalysisError, ParameterError, ScanError
from src.core.seeding import derive_seed
from src.datasets.loader import format_float
from src.graph.attributed import LaplacianMatrix
from src.kernel.base import EXACT
from src.kernel.chebyshev import DEFAULT_DEGREE
from src.kernel.exact import DEFAULT_DENSE_LIMIT, spectral_decomposition
from src.kernel.heat import AUTO, choose_method, heat_kernel
from src.scales.variation import ensemble_vi, vi_matrix
from src.stability.contexts import DEFAULT_RUNS, best_partition
from src.stability.partition import Partition

logger = logging.getLogger(__name__)

DEFAULT_T_MIN = 1e-2
DEFAULT_T_MAX = 1e3
DEFAULT_T_COUNT = 100
DEFAULT_DIP_QUANTILE = 0.25
DEFAULT_PLATEAU_EPS = 0.05
DEFAULT_MIN_PLATEAU = 3


def time_grid(t_min: float = DEFAULT_T_MIN, t_max: float = DEFAULT_T_MAX,
              count: int = DEFAULT_T_COUNT) -> np.ndarray:
    """Logarithmically spaced times on [t_min, t_max]"""
    if not 0 < t_min <= t_max:
        raise ParameterError(f"need 0 < t_min <= t_max, got {t_min}, {t_max}")
    if count < 1:
        raise ParameterError(f"time grid needs at least one point, got {count}")
    if count == 1:
        return np.array([float(t_min)])
    return np.logspace(np.log10(t_min), np.log10(t_max), count)


def time_label(t: float) -> str:
    """File-name form of a time, e.g. t_1.5"""
    return f"t_{format_float(t)}"


@dataclass(frozen=True, eq=False)
class ScaleScan:
    """Per-time results of a scan over an ascending grid of times"""
    times: np.ndarray
    best_partitions: List[Partition]
    num_clusters: np.ndarray
    vi_within: np.ndarray
    vi_within_std: np.ndarray
    vi_cross: np.ndarray
    concentration: List[Optional[ConcentrationProfile]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def stability(self) -> np.ndarray:
        return np.array([np.nan if p.score is None else p.score for p in self.best_partitions])

    def index_of(self, t: float) -> int:
        hits = np.flatnonzero(np.isclose(self.times, t, rtol=1e-12, atol=0.0))
        if len(hits) == 0:
            raise ParameterError(f"t={t:g} is not on the scan grid")
        return int(hits[0])

    def vi_within_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "t": self.times,
            "K": self.num_clusters,
            "vi": self.vi_within,
            "vi_std": self.vi_within_std,
            "stability": self.stability,
        })

    def vi_cross_frame(self) -> pd.DataFrame:
        labels = [format_float(t) for t in self.times]
        frame = pd.DataFrame(self.vi_cross, index=labels, columns=labels)
        frame.index.name = "t"
        return frame

    def to_dict(self) -> Dict[str, Any]:
        return {
            "times": self.times.tolist(),
            "num_clusters": self.num_clusters.tolist(),
            "vi_within": self.vi_within.tolist(),
            "vi_within_std": self.vi_within_std.tolist(),
            "stability": self.stability.tolist(),
        }


def _check_times(times: Sequence[float]) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise ParameterError("the time grid must be a nonempty list of times")
    if np.any(times <= 0) or not np.all(np.isfinite(times)):
        raise ParameterError("scan times must be positive and finite")
    if np.any(np.diff(times) < 0):
        raise ParameterError("scan times must be ascending")
    return times


def scan(L: LaplacianMatrix, times: Sequence[float], runs: int = DEFAULT_RUNS,
         rng_seed: int = 0, workers: int = 1, method: str = AUTO,
         dense_limit: int = DEFAULT_DENSE_LIMIT, degree: int = DEFAULT_DEGREE,
         merge: bool = True, sparsify_eps: float = 0.0, refine_bound: bool = False,
         with_concentration: bool = True) -> ScaleScan:
    """
    Run the context search at every time of the grid.

    Every time uses the same master seed, so the scan entry at t equals
    best_partition(L, t, runs, rng_seed).

    Args:
        L: Laplacian of the weighted graph
        times: Ascending positive times
        runs: Louvain runs per time
        rng_seed: Master seed
        workers: Pool size for Louvain runs and Chebyshev columns
        method: Kernel method ("auto", "exact", "chebyshev")
        dense_limit: Node count above which "auto" uses Chebyshev
        degree: Initial Chebyshev degree
        merge: Absorb singleton contexts
        sparsify_eps: Quality-matrix sparsification threshold
        refine_bound: Tighten lambda_max by power iteration
        with_concentration: Record the concentration profile per time

    Returns:
        ScaleScan

    Raises:
        ScanError: any failure while processing one time, carrying that time
    """
    times = _check_times(times)
    if runs < 1:
        raise ParameterError(f"runs must be >= 1, got {runs}")

    decomposition = None
    if choose_method(L.order, method, dense_limit) == EXACT:
        decomposition = spectral_decomposition(L, dense_limit=dense_limit)

    logger.info("scanning %d times with %d Louvain runs each", len(times), runs)
    best: List[Partition] = []
    vi_mean, vi_std = [], []
    profiles: List[Optional[ConcentrationProfile]] = []
    for i, t in enumerate(times):
        try:
            kernel = heat_kernel(L, float(t), method=method, dense_limit=dense_limit,
                                 degree=degree, workers=workers, refine_bound=refine_bound,
                                 decomposition=decomposition)
            partition, ensemble = best_partition(L, float(t), runs=runs, rng_seed=rng_seed,
                                                 workers=workers, kernel=kernel, merge=merge,
                                                 sparsify_eps=sparsify_eps)
            spread = ensemble_vi(ensemble, rng_seed=derive_seed(rng_seed, "vi-pairs", i))
        except ScanError:
            raise
        except (AnalysisError, np.linalg.LinAlgError, FloatingPointError) as exc:
            raise ScanError(float(t), exc) from exc

        best.append(partition)
        vi_mean.append(spread.mean)
        vi_std.append(spread.std)
        profiles.append(concentration_profile(kernel) if with_concentration else None)
        logger.debug("t=%g K=%d VI=%.4f", t, partition.num_contexts, spread.mean)

    return ScaleScan(
        times=times,
        best_partitions=best,
        num_clusters=np.array([p.num_contexts for p in best], dtype=np.int64),
        vi_within=np.array(vi_mean),
        vi_within_std=np.array(vi_std),
        vi_cross=vi_matrix(best),
        concentration=profiles,
    )


@dataclass
class SelectionReason:
    """Diagnostics of one selected scale"""
    time: float
    index: int
    num_contexts: int
    vi_within: float
    dip_threshold: float
    plateau_start: float
    plateau_end: float
    plateau_length: int
    merged_times: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "time": self.time,
            "index": self.index,
            "num_contexts": self.num_contexts,
            "vi_within": self.vi_within,
            "dip_threshold": self.dip_threshold,
            "plateau": {"start": self.plateau_start, "end": self.plateau_end,
                        "length": self.plateau_length},
            "merged_times": self.merged_times,
        }


@dataclass
class ScaleSelection:
    """Selected times, ascending, with the diagnostics behind each choice"""
    selected_times: List[float] = field(default_factory=list)
    reasons: List[SelectionReason] = field(default_factory=list)
    parameters: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.selected_times)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "selected_times": self.selected_times,
            "reasons": [r.to_dict() for r in self.reasons],
            "parameters": self.parameters,
        }


def _plateau_ends(vi_cross: np.ndarray, eps: float) -> np.ndarray:
    """For every start i, the last j such that all of vi_cross[i..j, i..j] < eps"""
    n = len(vi_cross)
    ends = np.empty(n, dtype=np.int64)
    j = -1
    for i in range(n):
        j = max(j, i)
        if not vi_cross[i, i] < eps:
            ends[i] = i - 1
            continue
        while j + 1 < n and np.all(vi_cross[i:j + 2, j + 1] < eps):
            j += 1
        ends[i] = j
    return ends


def select_scales(scan_result: ScaleScan, dip_quantile: float = DEFAULT_DIP_QUANTILE,
                  plateau_eps: float = DEFAULT_PLATEAU_EPS,
                  min_plateau: int = DEFAULT_MIN_PLATEAU) -> ScaleSelection:
    """
    Pick one representative time per plateau of VI(t, t').

    A plateau is a maximal run of consecutive grid times whose pairwise
    VI(t, t') are all below plateau_eps, at least min_plateau long. Inside it
    the time with the smallest VI(t) is chosen, provided VI(t) is at most the
    dip_quantile quantile of VI(t) over the grid. Repeated grid times count
    once, and plateaus whose chosen partitions coincide are merged.
    """
    if not 0.0 <= dip_quantile <= 1.0:
        raise ParameterError(f"dip_quantile must lie in [0, 1], got {dip_quantile}")
    if plateau_eps < 0:
        raise ParameterError(f"plateau_eps must be nonnegative, got {plateau_eps}")
    if min_plateau < 1:
        raise ParameterError(f"min_plateau must be >= 1, got {min_plateau}")

    parameters = {"dip_quantile": dip_quantile, "plateau_eps": plateau_eps,
                  "min_plateau": min_plateau}
    times = scan_result.times
    keep = np.flatnonzero(np.r_[True, np.diff(times) > 0])
    vi_cross = scan_result.vi_cross[np.ix_(keep, keep)]
    vi_within = scan_result.vi_within[keep]
    threshold = float(np.quantile(vi_within, dip_quantile))

    ends = _plateau_ends(vi_cross, plateau_eps)
    reasons: List[SelectionReason] = []
    for start in range(len(keep)):
        end = int(ends[start])
        if end < start or (start > 0 and ends[start - 1] >= end):
            continue
        length = end - start + 1
        if length < min_plateau:
            continue
        window = np.arange(start, end + 1)
        window = window[vi_within[window] <= threshold + 1e-12]
        if len(window) == 0:
            continue
        local = int(window[np.argmin(vi_within[window])])
        original = int(keep[local])
        partition = scan_result.best_partitions[original]
        reason = SelectionReason(
            time=float(times[original]),
            index=original,
            num_contexts=partition.num_contexts,
            vi_within=float(vi_within[local]),
            dip_threshold=threshold,
            plateau_start=float(times[keep[start]]),
            plateau_end=float(times[keep[end]]),
            plateau_length=length,
        )

        duplicate = next((r for r in reasons
                          if scan_result.best_partitions[r.index].same_as(partition)), None)
        if duplicate is None:
            reasons.append(reason)
        elif reason.time != duplicate.time and reason.time not in duplicate.merged_times:
            duplicate.merged_times.append(reason.time)
            duplicate.plateau_start = min(duplicate.plateau_start, reason.plateau_start)
            duplicate.plateau_end = max(duplicate.plateau_end, reason.plateau_end)

    reasons.sort(key=lambda r: r.time)
    if not reasons:
        logger.warning("no scale met the plateau/dip criteria (eps=%g, min length=%d)",
                       plateau_eps, min_plateau)
    return ScaleSelection(selected_times=[r.time for r in reasons], reasons=reasons,
                          parameters=parameters)


def context_hierarchy(partitions: Sequence[Partition],
                      times: Sequence[float]) -> List[Dict[str, Any]]:
    """
    Link each context at a finer selected scale to the coarser-scale context
    holding most of its nodes (ties: lowest id), with the overlap fraction.

    Partitions are taken in the given (ascending time) order.
    """
    levels = []
    for (fine, t_fine), (coarse, t_coarse) in zip(zip(partitions, times),
                                                  zip(partitions[1:], times[1:])):
        table = contingency_matrix(fine.assignment, coarse.assignment)
        links = []
        for c, row in enumerate(table):
            parent = int(np.argmax(row))
            links.append({
                "context": c,
                "size": int(row.sum()),
                "parent": parent,
                "overlap": float(row[parent] / row.sum()),
            })
        levels.append({"fine_time": float(t_fine), "coarse_time": float(t_coarse),
                       "links": links})
    return levels
