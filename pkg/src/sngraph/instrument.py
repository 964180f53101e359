"""Measurements on builds and searches: pruning traces, first-passage levels,
degree and path-length statistics, recall, and their CSV/JSON emitters.

The pruning construction is a stochastic process worth watching: each
iteration selects one nearest survivor and prunes ``delta`` others, so the
processed count after t iterations is sum(delta_i + 1) and must equal
(n - 1) - |S_t|. PruningTrace records that process; the helpers here ask how
fast it runs (first passage of a processed-count level, growth of that level
across n) and how the finished graphs behave (degrees, search hops, recall).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import GroundTruth, VectorDataset
from .graph import SngGraph, search_many

__all__ = [
    "PruningTrace",
    "DegreeStats",
    "PathStats",
    "SublinearReport",
    "mt_first_passage",
    "degree_stats",
    "path_length_stats",
    "recall_at_k",
    "sublinear_progress_check",
    "write_trace_csv",
    "write_degree_csv",
    "write_paths_csv",
    "write_json_summary",
]


@dataclass
class PruningTrace:
    """Per-owner log of the pruning construction.

    One row per iteration: (t, s_size, delta, rho) — survivors left after the
    step, candidates pruned by it (the selected point itself not counted), and
    the Euclidean distance to the selected point. Iterations are 1-based; rho
    never decreases because the nearest survivor only gets farther away.
    """

    owner: int
    rows: list = field(default_factory=list)

    def record(self, s_size: int, delta: int, rho: float) -> None:
        self.rows.append((len(self.rows) + 1, int(s_size), int(delta), float(rho)))

    def __len__(self) -> int:
        return len(self.rows)

    def processed(self, t: int) -> int:
        """Points selected or pruned through iteration t: sum of (delta_i + 1)."""
        if not 1 <= t <= len(self.rows):
            raise ValueError(f"t must be in [1, {len(self.rows)}], got {t}")
        return sum(d + 1 for _, _, d, _ in self.rows[:t])

    def implied_n(self) -> int:
        """Dataset size implied by the identity processed(t) + s_size(t) = n - 1."""
        if not self.rows:
            raise ValueError("empty trace")
        _, s_last, _, _ = self.rows[-1]
        return self.processed(len(self.rows)) + s_last + 1

    def is_complete(self) -> bool:
        """True when the candidate set was exhausted (not a capped run)."""
        return bool(self.rows) and self.rows[-1][1] == 0

    def validate(self) -> None:
        """Raise ValueError unless every structural invariant holds."""
        if not self.rows:
            raise ValueError("empty trace")
        n = self.implied_n()
        done = 0
        prev_s = n - 1
        prev_rho = -math.inf
        for i, (t, s, d, rho) in enumerate(self.rows):
            if t != i + 1:
                raise ValueError(f"row {i}: t={t}, expected {i + 1}")
            if d < 0:
                raise ValueError(f"t={t}: negative delta {d}")
            if s >= prev_s:
                raise ValueError(f"t={t}: s_size {s} not below previous {prev_s}")
            if rho < prev_rho:
                raise ValueError(f"t={t}: rho {rho} decreased from {prev_rho}")
            done += d + 1
            if done != (n - 1) - s:
                raise ValueError(f"t={t}: processed {done} != (n-1) - s_size = {(n - 1) - s}")
            prev_s, prev_rho = s, rho


def mt_first_passage(trace: PruningTrace, m: int):
    """Smallest iteration t with processed(t) >= m, or None if never reached."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    done = 0
    for t, _, d, _ in trace.rows:
        done += d + 1
        if done >= m:
            return t
    return None


@dataclass(frozen=True)
class DegreeStats:
    """Out-degree summary; histogram[d] counts nodes with out-degree d."""

    min: int
    max: int
    mean: float
    histogram: np.ndarray


def degree_stats(g: SngGraph) -> DegreeStats:
    degs = g.out_degrees()
    return DegreeStats(
        min=int(degs.min()),
        max=int(degs.max()),
        mean=float(degs.mean()),
        histogram=np.bincount(degs),
    )


@dataclass(frozen=True)
class PathStats:
    """Hop counts of greedy searches started at the medoid; a hop is one
    strictly-improving move of the closest discovered node."""

    mean_hops: float
    p99_hops: float
    hops: np.ndarray


def path_length_stats(g: SngGraph, ds: VectorDataset, queries, l: int, threads: int = 1) -> PathStats:
    _, _, hops = search_many(g, ds, queries, g.medoid, l=l, k=1, threads=threads)
    return PathStats(
        mean_hops=float(hops.mean()),
        p99_hops=float(np.percentile(hops, 99)),
        hops=hops,
    )


def recall_at_k(results, gt: GroundTruth, k: int) -> float:
    """Mean over queries of |retrieved ∩ true top-k| / k."""
    ids = np.asarray(results, dtype=np.int64)
    if ids.ndim != 2 or ids.shape[1] != k:
        raise ValueError(f"results must be (n_queries, {k}), got {ids.shape}")
    if gt.ids.shape[0] != ids.shape[0]:
        raise ValueError(f"{ids.shape[0]} result rows vs {gt.ids.shape[0]} ground-truth rows")
    if gt.ids.shape[1] < k:
        raise ValueError(f"ground truth has only {gt.ids.shape[1]} neighbors, need {k}")
    true = gt.ids[:, :k]
    hits = 0
    for row, t in zip(ids, true):
        hits += len(set(row.tolist()) & set(t.tolist()))
    return hits / (k * ids.shape[0])


@dataclass(frozen=True)
class SublinearReport:
    """Growth check of first-passage times across dataset sizes.

    For each n, t_of_n holds the mean first passage of the processed-count
    level n - n^(1-nu). ``slope`` is the log-log fit of t against n, and
    ``flagged`` marks slopes above nu + 0.15 (growth faster than the level
    itself would explain).
    """

    nu: float
    t_of_n: dict
    slope: float
    flagged: bool


def sublinear_progress_check(traces, nu: float) -> SublinearReport:
    """First-passage growth of the level n - n^(1-nu) over complete traces.

    Groups traces by their implied n (at least 3 distinct sizes required),
    averages the first passage within each group, and fits log t = a + s log n.
    """
    if not 0 < nu < 1:
        raise ValueError(f"nu must be in (0, 1), got {nu}")
    groups: dict[int, list[int]] = {}
    for tr in traces:
        if not tr.is_complete():
            raise ValueError(f"owner {tr.owner}: trace is truncated; level may be unreachable")
        n = tr.implied_n()
        level = n - n ** (1.0 - nu)
        t = mt_first_passage(tr, max(1, math.ceil(level)))
        if t is None:  # complete traces process all n-1 >= level points
            raise ValueError(f"owner {tr.owner}: level {level} never reached")
        groups.setdefault(n, []).append(t)
    if len(groups) < 3:
        raise ValueError(f"need >= 3 distinct n values, got {len(groups)}")
    t_of_n = {n: float(np.mean(ts)) for n, ts in sorted(groups.items())}
    log_n = np.log(np.fromiter(t_of_n.keys(), dtype=np.float64))
    log_t = np.log(np.fromiter(t_of_n.values(), dtype=np.float64))
    slope = float(np.polyfit(log_n, log_t, 1)[0])
    return SublinearReport(nu=nu, t_of_n=t_of_n, slope=slope, flagged=slope > nu + 0.15)


def write_trace_csv(path, traces) -> None:
    """Columns: owner,t,s_size,delta,rho (one row per iteration per owner)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["owner", "t", "s_size", "delta", "rho"])
        for tr in traces:
            for t, s, d, rho in tr.rows:
                w.writerow([tr.owner, t, s, d, repr(rho)])


def write_degree_csv(path, stats: DegreeStats) -> None:
    """Columns: degree,count (unit-width bins; counts sum to n)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["degree", "count"])
        for deg, cnt in enumerate(stats.histogram):
            w.writerow([deg, int(cnt)])


def write_paths_csv(path, hops) -> None:
    """Columns: query,hops (one row per query, in input order)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["query", "hops"])
        for i, h in enumerate(np.asarray(hops).tolist()):
            w.writerow([i, int(h)])


def write_json_summary(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")
