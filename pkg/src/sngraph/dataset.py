"""Vector datasets: generation, fvecs/ivecs files, splits, and exact ground truth.

File layout (the common benchmark interchange format): each record is a
little-endian int32 dimension followed by that many little-endian float32
(fvecs) or int32 (ivecs) values. All records in a file share one dimension.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import vecmath

__all__ = [
    "VectorDataset",
    "GroundTruth",
    "VecsFormatError",
    "MalformedHeaderError",
    "InconsistentDimensionError",
    "TruncatedFileError",
    "read_fvecs",
    "write_fvecs",
    "read_ivecs",
    "write_ivecs",
    "gen_uniform",
    "gen_gmm",
    "shuffle_split",
    "brute_force_knn",
]


class VecsFormatError(ValueError):
    """Base for malformed fvecs/ivecs files."""


class MalformedHeaderError(VecsFormatError):
    """File too short for a header, or a nonpositive dimension."""


class InconsistentDimensionError(VecsFormatError):
    """A record announces a different dimension than the first one."""


class TruncatedFileError(VecsFormatError):
    """File size does not cover the last record announced by its header."""


@dataclass(frozen=True)
class VectorDataset:
    """Immutable (n, d) float32 point set with a human-readable source tag."""

    data: np.ndarray
    source: str = ""

    def __post_init__(self) -> None:
        arr = np.asarray(self.data)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a nonempty 2-d array, got shape {arr.shape}")
        converted = np.ascontiguousarray(arr, dtype=np.float32)
        if converted is arr:
            converted = arr.copy()
        if not np.isfinite(converted).all():
            raise ValueError("dataset values must all be finite")
        converted.flags.writeable = False
        object.__setattr__(self, "data", converted)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    @cached_property
    def data64(self) -> np.ndarray:
        """Float64 view of the points, cached; all distance math runs on this."""
        out = self.data.astype(np.float64)
        out.flags.writeable = False
        return out

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class GroundTruth:
    """Exact k-nearest-neighbor answers: ids and squared distances, row per query."""

    ids: np.ndarray        # (q, k) int64
    distances: np.ndarray  # (q, k) float64, nondecreasing along each row

    def __post_init__(self) -> None:
        ids = np.ascontiguousarray(self.ids, dtype=np.int64)
        dist = np.ascontiguousarray(self.distances, dtype=np.float64)
        if ids.shape != dist.shape or ids.ndim != 2:
            raise ValueError("ids and distances must be 2-d arrays of equal shape")
        if np.any(np.diff(dist, axis=1) < 0):
            raise ValueError("distances must be nondecreasing along each row")
        ids.flags.writeable = False
        dist.flags.writeable = False
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "distances", dist)

    @property
    def k(self) -> int:
        return self.ids.shape[1]


def _read_records(path, dtype: str) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 4:
        raise MalformedHeaderError(f"{path}: no record header (file has {len(raw)} bytes)")
    words = np.frombuffer(raw[: len(raw) - (len(raw) % 4)], dtype="<i4")
    d = int(words[0])
    if d < 1:
        raise MalformedHeaderError(f"{path}: record dimension must be >= 1, header says {d}")
    rec = 1 + d
    n_full = words.size // rec
    headers = words[: n_full * rec : rec]
    bad = np.flatnonzero(headers != d)
    if bad.size:
        raise InconsistentDimensionError(
            f"{path}: record {int(bad[0])} announces dimension "
            f"{int(headers[bad[0]])}, expected {d}"
        )
    if len(raw) != n_full * rec * 4:
        raise TruncatedFileError(
            f"{path}: {len(raw)} bytes is not a whole number of "
            f"records of dimension {d} ({rec * 4} bytes each)"
        )
    body = words.reshape(n_full, rec)[:, 1:]
    return np.ascontiguousarray(body).view(dtype).copy()


def read_fvecs(path) -> VectorDataset:
    """Load an fvecs file; round-trips through write_fvecs bit-exactly."""
    return VectorDataset(_read_records(path, "<f4"), source=f"fvecs:{os.fspath(path)}")


def write_fvecs(path, ds: VectorDataset) -> None:
    out = np.empty((ds.n, 1 + ds.dim), dtype="<i4")
    out[:, 0] = ds.dim
    out[:, 1:] = ds.data.astype("<f4", copy=False).view("<i4")
    with open(path, "wb") as fh:
        fh.write(out.tobytes())


def read_ivecs(path) -> np.ndarray:
    """Load an ivecs file as an (n, d) int32 array (ground-truth id lists)."""
    return _read_records(path, "<i4")


def write_ivecs(path, rows) -> None:
    rows = np.ascontiguousarray(rows, dtype="<i4")
    if rows.ndim != 2:
        raise ValueError(f"expected a 2-d integer array, got shape {rows.shape}")
    out = np.empty((rows.shape[0], 1 + rows.shape[1]), dtype="<i4")
    out[:, 0] = rows.shape[1]
    out[:, 1:] = rows
    with open(path, "wb") as fh:
        fh.write(out.tobytes())


def gen_uniform(n: int, d: int, rho: float, seed: int) -> VectorDataset:
    """n points uniform in the d-ball of radius rho (seeded, reproducible)."""
    pts = vecmath.sample_uniform_ball(n, d, rho, seed)
    return VectorDataset(pts, source=f"uniform-ball(n={n}, d={d}, rho={rho}, seed={seed})")


def gen_gmm(
    n: int,
    d: int,
    clusters: int,
    spread: float = 0.05,
    seed: int = 42,
    mean_low: float = 0.0,
    mean_high: float = 1.0,
    weights=None,
    return_components: bool = False,
):
    """Sample a Gaussian mixture: cluster means uniform in [mean_low, mean_high]^d,
    isotropic standard deviation ``spread``, equal weights unless given.

    With return_components=True also returns (means, labels) so callers can
    check per-cluster statistics. Fully determined by the seed.
    """
    if clusters < 1 or clusters > n:
        raise ValueError(f"need 1 <= clusters <= n, got clusters={clusters}, n={n}")
    if not spread > 0.0:
        raise ValueError(f"spread must be positive, got {spread}")
    if weights is not None:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (clusters,) or np.any(weights < 0) or weights.sum() <= 0:
            raise ValueError("weights must be `clusters` nonnegative values with positive sum")
        weights = weights / weights.sum()
    rng = np.random.default_rng(seed)
    means = rng.uniform(mean_low, mean_high, size=(clusters, d))
    labels = rng.choice(clusters, size=n, p=weights)
    pts = means[labels] + spread * rng.standard_normal((n, d))
    ds = VectorDataset(
        pts, source=f"gmm(n={n}, d={d}, clusters={clusters}, spread={spread}, seed={seed})"
    )
    if return_components:
        return ds, means, labels
    return ds


def shuffle_split(ds: VectorDataset, n_queries: int, seed: int) -> tuple[VectorDataset, VectorDataset]:
    """Deterministic seeded shuffle, then split off the last n_queries as queries."""
    if not 0 < n_queries < ds.n:
        raise ValueError(f"need 0 < n_queries < n, got n_queries={n_queries}, n={ds.n}")
    perm = np.random.default_rng(seed).permutation(ds.n)
    base = VectorDataset(ds.data[perm[: ds.n - n_queries]], source=f"{ds.source}|base")
    queries = VectorDataset(ds.data[perm[ds.n - n_queries:]], source=f"{ds.source}|queries")
    return base, queries


def _knn_block(base64: np.ndarray, queries64: np.ndarray, k: int, out_ids, out_dist, row0: int) -> None:
    for i in range(queries64.shape[0]):
        diff = base64 - queries64[i]
        dist = np.einsum("ij,ij->i", diff, diff)
        order = np.argsort(dist, kind="stable")[:k]  # stable sort: ties fall to the lower id
        out_ids[row0 + i] = order
        out_dist[row0 + i] = dist[order]


def brute_force_knn(base: VectorDataset, queries: VectorDataset, k: int, threads: int = 1) -> GroundTruth:
    """Exact k nearest neighbors under squared Euclidean distance, ties by lower id.

    With threads > 1 the queries are partitioned across a thread pool; the
    result is identical to the sequential scan.
    """
    if base.dim != queries.dim:
        raise ValueError(f"dimension mismatch: base d={base.dim}, queries d={queries.dim}")
    if not 1 <= k <= base.n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={base.n}")
    base64 = base.data64
    q64 = queries.data64
    out_ids = np.empty((queries.n, k), dtype=np.int64)
    out_dist = np.empty((queries.n, k), dtype=np.float64)
    if threads <= 1 or queries.n == 1:
        _knn_block(base64, q64, k, out_ids, out_dist, 0)
    else:
        bounds = np.linspace(0, queries.n, min(threads, queries.n) + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_knn_block, base64, q64[a:b], k, out_ids, out_dist, int(a))
                for a, b in zip(bounds[:-1], bounds[1:])
                if b > a
            ]
            for f in futures:
                f.result()
    return GroundTruth(out_ids, out_dist)
