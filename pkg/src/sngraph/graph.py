"""Sparse neighborhood graphs: pruning construction, search, and persistence.

Two builders are provided. ``build_full_sng`` runs the exhaustive pruning rule
per node (every other point starts as a candidate; repeatedly take the nearest
survivor and discard candidates that are closer to it than to the owner, scaled
by alpha). ``build_vamana`` is the incremental variant: random regular start,
then one pass of greedy search + pruned reinsertion per point with a degree cap.

All comparisons use squared Euclidean distance in float64; argmin ties always
fall to the smallest id, so builds and searches are deterministic functions of
(data, parameters, seed). The hot loops live in _kernels (numba when present,
numpy fallbacks here).
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dataset import VectorDataset

__all__ = [
    "BuildParams",
    "SngGraph",
    "SearchResult",
    "GraphFormatError",
    "BadMagicError",
    "TruncatedGraphFileError",
    "GraphInvariantError",
    "medoid",
    "sng_neighbors",
    "robust_prune",
    "greedy_search",
    "search_many",
    "build_full_sng",
    "build_vamana",
    "save_graph",
    "load_graph",
    "check_structure",
    "check_prune_list",
]

BUILD_KINDS = ("full-sng", "vamana", "random-regular")
_KIND_CODE = {kind: code for code, kind in enumerate(BUILD_KINDS)}
_MAGIC = b"SNG1"
_HEADER = struct.Struct("<4sIIIfIB")


class GraphFormatError(ValueError):
    """Base for unreadable graph files."""


class BadMagicError(GraphFormatError):
    """File does not start with the SNG1 magic."""


class TruncatedGraphFileError(GraphFormatError):
    """File length disagrees with the header and per-node records."""


class GraphInvariantError(GraphFormatError):
    """Loaded (or checked) graph violates a structural invariant."""


@dataclass
class BuildParams:
    """Construction knobs: pruning slack alpha >= 1, degree cap r, search list
    size l_build (defaults to max(2r, 50)), and the rng seed."""

    alpha: float
    r: int
    l_build: int | None = None
    seed: int = 42

    def __post_init__(self) -> None:
        if not self.alpha >= 1.0:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if self.l_build is None:
            self.l_build = max(2 * self.r, 50)
        if self.l_build < self.r:
            raise ValueError(f"l_build must be >= r, got l_build={self.l_build}, r={self.r}")


@dataclass
class SngGraph:
    """Directed out-neighbor lists over a dataset, plus build metadata."""

    n: int
    dim: int
    adjacency: list  # per-node int64 arrays, insertion order preserved
    alpha: float
    r_cap: int | None
    medoid: int
    build_kind: str
    _flat_cache: tuple | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.adjacency) != self.n:
            raise ValueError(f"adjacency has {len(self.adjacency)} rows for n={self.n}")
        if self.build_kind not in BUILD_KINDS:
            raise ValueError(f"unknown build_kind {self.build_kind!r}")

    def neighbors(self, i: int) -> np.ndarray:
        return self.adjacency[i]

    def out_degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=self.n)

    def flat_adjacency(self):
        """(flat, starts, lens) arrays: node v's list is flat[starts[v] : starts[v] + lens[v]]."""
        if self._flat_cache is None:
            lens = self.out_degrees()
            starts = np.zeros(self.n, dtype=np.int64)
            np.cumsum(lens[:-1], out=starts[1:])
            rows = [np.asarray(a, dtype=np.int64) for a in self.adjacency]
            rows.append(np.empty(0, dtype=np.int64))
            self._flat_cache = (np.concatenate(rows), starts, lens)
        return self._flat_cache


@dataclass
class SearchResult:
    """Beam-search outcome: the k best ids/squared distances (ascending), the
    expansion order, and the strictly-improving move count along ``path``."""

    topk_ids: np.ndarray
    topk_dists: np.ndarray
    visited: list
    hops: int
    path: list

    @property
    def topk(self) -> list:
        return list(zip(self.topk_ids.tolist(), self.topk_dists.tolist()))


def medoid(ds: VectorDataset, exact_threshold: int = 20_000, sample_size: int = 10_000, seed: int = 0) -> int:
    """Point minimizing the summed Euclidean distance to the dataset.

    Exact for n <= exact_threshold; above that the sum runs over a seeded
    sample of ``sample_size`` points (the argmin still ranges over all points).
    """
    data = ds.data64
    n = ds.n
    if n <= exact_threshold:
        ref = data
    else:
        pick = np.random.default_rng(seed).choice(n, size=sample_size, replace=False)
        ref = data[np.sort(pick)]
    ref_sq = np.einsum("ij,ij->i", ref, ref)
    totals = np.empty(n, dtype=np.float64)
    block = max(1, int(2e7) // ref.shape[0])
    for a in range(0, n, block):
        b = min(n, a + block)
        rows = data[a:b]
        d2 = (
            np.einsum("ij,ij->i", rows, rows)[:, None]
            + ref_sq[None, :]
            - 2.0 * (rows @ ref.T)
        )
        np.maximum(d2, 0.0, out=d2)
        totals[a:b] = np.sqrt(d2, out=d2).sum(axis=1)
    return int(np.argmin(totals))


def sng_neighbors(ds: VectorDataset, p: int, alpha: float, r_cap: int | None = None, trace=None):
    """Neighbor list of point p under the pruning construction.

    Start from every other point as a candidate. Repeatedly: pick the nearest
    candidate p* (ties to the smallest id), append the edge p -> p*, then drop
    every candidate at least alpha times closer to p* than to p. Stops when the
    candidates run out, or after r_cap edges if a cap is given (the capped
    final step removes only p*, it does not prune).

    ``trace``, if given, receives one record(s_size, delta, rho) call per
    iteration: survivors left, candidates pruned (p* not counted), and the
    Euclidean distance to p*.
    """
    n = ds.n
    if not 0 <= p < n:
        raise ValueError(f"p out of range: {p} not in [0, {n})")
    if not alpha >= 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if r_cap is not None and r_cap < 1:
        raise ValueError(f"r_cap must be >= 1 or None, got {r_cap}")
    data = ds.data64
    ids = np.concatenate([np.arange(p, dtype=np.int64), np.arange(p + 1, n, dtype=np.int64)])
    diff = data[ids] - data[p]
    d_p = np.einsum("ij,ij->i", diff, diff)
    a2 = alpha * alpha
    out: list[int] = []
    while ids.size and (r_cap is None or len(out) < r_cap):
        j = int(np.argmin(d_p))  # ids stay ascending, so the first min is the smallest id
        star = int(ids[j])
        d_star = float(d_p[j])
        out.append(star)
        if r_cap is not None and len(out) == r_cap:
            delta = 0
            keep = np.ones(ids.size, dtype=bool)
            keep[j] = False
        else:
            sdiff = data[ids] - data[star]
            d_s = np.einsum("ij,ij->i", sdiff, sdiff)
            keep = d_p < a2 * d_s
            keep[j] = False
            delta = int(ids.size - 1 - np.count_nonzero(keep))
        ids = ids[keep]
        d_p = d_p[keep]
        if trace is not None:
            trace.record(s_size=int(ids.size), delta=delta, rho=float(np.sqrt(d_star)))
    return np.array(out, dtype=np.int64)


def _prune_sorted_numpy(data, cand, d_p, alpha2, r, out):
    alive = np.ones(cand.size, dtype=bool)
    pts = data[cand]
    nout = 0
    i = 0
    while i < cand.size:
        if not alive[i]:
            i += 1
            continue
        out[nout] = cand[i]
        nout += 1
        alive[i] = False
        if nout == r:
            break
        sdiff = pts - pts[i]
        d_s = np.einsum("ij,ij->i", sdiff, sdiff)
        alive &= d_p < alpha2 * d_s
        i += 1
    return nout


def _prune(data, p, cand, alpha, r, out_buf=None):
    """Pruning rule over an explicit candidate array (p excluded, deduped)."""
    if cand.size == 0:
        return np.empty(0, dtype=np.int64)
    diffs = data[cand] - data[p]
    d_p = np.einsum("ij,ij->i", diffs, diffs)
    order = np.lexsort((cand, d_p))
    cand_s = np.ascontiguousarray(cand[order])
    d_s = np.ascontiguousarray(d_p[order])
    out = out_buf if out_buf is not None else np.empty(min(r, cand.size), dtype=np.int64)
    if _kernels.HAVE_NUMBA:
        nout = _kernels.prune_core(data, cand_s, d_s, alpha * alpha, r, out)
    else:
        nout = _prune_sorted_numpy(data, cand_s, d_s, alpha * alpha, r, out)
    return out[:nout]


def robust_prune(g: SngGraph, ds: VectorDataset, p: int, candidates, alpha: float, r: int) -> np.ndarray:
    """Prune a candidate set down to at most r neighbors for p; updates g in place.

    Same selection rule as sng_neighbors run on the given candidates: nearest
    survivor first, then discard candidates at least alpha times closer to it
    than to p, stopping at r edges. Returns the new neighbor list.
    """
    if not 0 <= p < ds.n:
        raise ValueError(f"p out of range: {p} not in [0, {ds.n})")
    if not alpha >= 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    cand = np.unique(np.asarray(list(candidates), dtype=np.int64))
    if cand.size and (cand[0] < 0 or cand[-1] >= ds.n):
        raise ValueError("candidate ids out of range")
    cand = cand[cand != p]
    new = _prune(ds.data64, p, cand, alpha, r).copy()
    g.adjacency[p] = new
    g._flat_cache = None
    return new


class _Workspace:
    """Per-thread scratch: a stamp array marking nodes seen by the current
    search, plus visit/path buffers sized for the worst case."""

    def __init__(self, n: int):
        self.stamp = np.zeros(n, dtype=np.int64)
        self.tick = 0
        self.visited_buf = np.empty(n + 1, dtype=np.int64)
        self.path_buf = np.empty(n + 2, dtype=np.int64)

    def fresh(self):
        self.tick += 1
        return self.stamp, self.tick


def _greedy_numpy(data, flat, starts, lens, query, start, l, seen, tick, visited_buf, path_buf):
    seen[start] = tick
    diff = data[start] - query
    cand_ids = np.array([start], dtype=np.int64)
    cand_d = np.array([float(diff @ diff)])
    expanded = np.zeros(1, dtype=bool)
    unexpanded = 1
    nvis = 0
    path_buf[0] = start
    npath = 1
    best = cand_d[0]
    while unexpanded:
        i = int(np.argmax(~expanded))
        node = int(cand_ids[i])
        expanded[i] = True
        unexpanded -= 1
        visited_buf[nvis] = node
        nvis += 1
        nbrs = flat[starts[node] : starts[node] + lens[node]]
        if nbrs.size == 0:
            continue
        new = nbrs[seen[nbrs] != tick]
        if new.size == 0:
            continue
        seen[new] = tick
        nd = np.einsum("ij,ij->i", data[new] - query, data[new] - query)
        if cand_ids.size == l:
            # a full list only improves: skip entrants that would be cut anyway
            worst_d = cand_d[-1]
            worst_id = cand_ids[-1]
            ok = (nd < worst_d) | ((nd == worst_d) & (new < worst_id))
            new = new[ok]
            nd = nd[ok]
            if new.size == 0:
                continue
        all_ids = np.concatenate([cand_ids, new])
        all_d = np.concatenate([cand_d, nd])
        all_e = np.concatenate([expanded, np.zeros(new.size, dtype=bool)])
        order = np.lexsort((all_ids, all_d))[:l]
        cand_ids = all_ids[order]
        cand_d = all_d[order]
        expanded = all_e[order]
        unexpanded = int(cand_d.size - np.count_nonzero(expanded))
        if cand_d[0] < best:
            best = cand_d[0]
            path_buf[npath] = int(cand_ids[0])
            npath += 1
    return cand_ids, cand_d, cand_ids.size, nvis, npath


def _run_greedy(data, flat, starts, lens, query, start, l, ws: _Workspace):
    seen, tick = ws.fresh()
    runner = _kernels.greedy_core if _kernels.HAVE_NUMBA else _greedy_numpy
    cand_ids, cand_d, ncand, nvis, npath = runner(
        data, flat, starts, lens, query, start, l, seen, tick, ws.visited_buf, ws.path_buf
    )
    return cand_ids[:ncand], cand_d[:ncand], ws.visited_buf[:nvis], ws.path_buf[:npath]


def greedy_search(g: SngGraph, ds: VectorDataset, query, start: int, l: int, k: int) -> SearchResult:
    """Beam search from ``start`` over the graph's out-edges.

    Maintains the l best discovered nodes and expands the closest unexpanded
    one until every node on the list has been expanded. ``hops`` counts the
    strictly improving moves of the closest known node, i.e. the length of the
    distance-decreasing path recorded in ``path``.
    """
    if g.n != ds.n:
        raise ValueError(f"graph has n={g.n} but dataset has n={ds.n}")
    if not 0 <= start < g.n:
        raise ValueError(f"start out of range: {start}")
    if k < 1 or l < k:
        raise ValueError(f"need l >= k >= 1, got l={l}, k={k}")
    query = np.ascontiguousarray(np.asarray(query, dtype=np.float64).reshape(-1))
    if query.shape[0] != ds.dim:
        raise ValueError(f"query has dimension {query.shape[0]}, dataset has {ds.dim}")
    flat, starts, lens = g.flat_adjacency()
    ws = _Workspace(g.n)
    cand_ids, cand_d, visited, path = _run_greedy(ds.data64, flat, starts, lens, query, start, l, ws)
    kk = min(k, cand_ids.size)
    return SearchResult(
        topk_ids=cand_ids[:kk].copy(),
        topk_dists=cand_d[:kk].copy(),
        visited=visited.tolist(),
        hops=int(path.size - 1),
        path=path.tolist(),
    )


def search_many(g: SngGraph, ds: VectorDataset, queries, start: int, l: int, k: int, threads: int = 1):
    """greedy_search over a query matrix; returns (ids, dists, hops) arrays.

    Rows with fewer than k reachable nodes are padded with id -1 / inf.
    With threads > 1 queries are partitioned across a pool (results identical).
    """
    if k < 1 or l < k:
        raise ValueError(f"need l >= k >= 1, got l={l}, k={k}")
    q = queries.data64 if isinstance(queries, VectorDataset) else np.asarray(queries, dtype=np.float64)
    q = np.ascontiguousarray(q)
    if q.ndim != 2 or q.shape[1] != ds.dim:
        raise ValueError(f"queries must be (m, {ds.dim}), got {q.shape}")
    flat, starts, lens = g.flat_adjacency()
    data = ds.data64
    nq = q.shape[0]
    ids = np.full((nq, k), -1, dtype=np.int64)
    dists = np.full((nq, k), np.inf, dtype=np.float64)
    hops = np.empty(nq, dtype=np.int64)

    def run(a: int, b: int) -> None:
        ws = _Workspace(g.n)
        for i in range(a, b):
            cand_ids, cand_d, _, path = _run_greedy(data, flat, starts, lens, q[i], start, l, ws)
            kk = min(k, cand_ids.size)
            ids[i, :kk] = cand_ids[:kk]
            dists[i, :kk] = cand_d[:kk]
            hops[i] = path.size - 1

    if threads <= 1 or nq == 1:
        run(0, nq)
    else:
        bounds = np.linspace(0, nq, min(threads, nq) + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(run, int(a), int(b))
                for a, b in zip(bounds[:-1], bounds[1:])
                if b > a
            ]
            for f in futures:
                f.result()
    return ids, dists, hops


def build_full_sng(ds: VectorDataset, alpha: float, sample=None) -> SngGraph:
    """Exhaustive pruning build: sng_neighbors per owner, no degree cap.

    ``sample`` restricts the owners whose lists are computed (the rest stay
    empty), which is how the degree-scaling experiments stay tractable.
    """
    if sample is None:
        owners = np.arange(ds.n, dtype=np.int64)
    else:
        owners = np.unique(np.asarray(sample, dtype=np.int64))
        if owners.size == 0 or owners[0] < 0 or owners[-1] >= ds.n:
            raise ValueError("sample ids must be nonempty and within [0, n)")
    adjacency = [np.empty(0, dtype=np.int64) for _ in range(ds.n)]
    for p in owners:
        adjacency[int(p)] = sng_neighbors(ds, int(p), alpha)
    return SngGraph(
        n=ds.n,
        dim=ds.dim,
        adjacency=adjacency,
        alpha=float(alpha),
        r_cap=None,
        medoid=medoid(ds),
        build_kind="full-sng",
    )


def _random_regular(n: int, r: int, rng) -> np.ndarray:
    # r distinct out-neighbors per node, uniform over the other n-1 nodes.
    draw = rng.integers(0, n - 1, size=(n, r), dtype=np.int64)
    rows = np.arange(n, dtype=np.int64)
    while True:
        shifted = draw + (draw >= rows[:, None])
        s = np.sort(shifted, axis=1)
        bad = np.flatnonzero((s[:, 1:] == s[:, :-1]).any(axis=1))
        if bad.size == 0:
            return shifted
        draw[bad] = rng.integers(0, n - 1, size=(bad.size, r), dtype=np.int64)


def build_vamana(ds: VectorDataset, params: BuildParams, validate_prunes: bool = False) -> SngGraph:
    """Degree-capped incremental build.

    Start from a seeded random r-regular digraph. In a seeded random order,
    each point is located with a beam search from the medoid; the nodes the
    search expanded become its candidate set, pruned to at most r neighbors.
    Each chosen neighbor j then gains the reverse edge, re-pruning j's list
    only when it would exceed r. Sequential and deterministic given the seed.
    """
    n = ds.n
    if params.r >= n:
        raise ValueError(f"need r <= n - 1, got r={params.r}, n={n}")
    data = ds.data64
    rng = np.random.default_rng(params.seed)
    r = params.r
    nbr_buf = np.empty((n, r + 1), dtype=np.int64)
    nbr_buf[:, :r] = _random_regular(n, r, rng)
    nbr_len = np.full(n, r, dtype=np.int64)
    flat = nbr_buf.ravel()
    starts = np.arange(n, dtype=np.int64) * (r + 1)
    start = medoid(ds)
    order = rng.permutation(n)
    ws = _Workspace(n)
    prune_buf = np.empty(r + 1, dtype=np.int64)
    alpha = float(params.alpha)
    for p in order:
        p = int(p)
        _, _, visited, _ = _run_greedy(data, flat, starts, nbr_len, data[p], start, params.l_build, ws)
        cand = np.unique(visited)
        cand = cand[cand != p]
        new = _prune(data, p, cand, alpha, r, out_buf=prune_buf)
        if validate_prunes:
            check_prune_list(ds, p, new, alpha)
        nbr_buf[p, : new.size] = new
        nbr_len[p] = new.size
        for j in nbr_buf[p, : new.size].tolist():
            lj = int(nbr_len[j])
            row = nbr_buf[j, :lj]
            if np.any(row == p):
                continue
            if lj == r:
                merged = np.concatenate([row, [p]])
                pruned = _prune(data, j, merged, alpha, r, out_buf=prune_buf)
                if validate_prunes:
                    check_prune_list(ds, j, pruned, alpha)
                nbr_buf[j, : pruned.size] = pruned
                nbr_len[j] = pruned.size
            else:
                nbr_buf[j, lj] = p
                nbr_len[j] = lj + 1
    adjacency = [nbr_buf[i, : nbr_len[i]].copy() for i in range(n)]
    return SngGraph(
        n=n,
        dim=ds.dim,
        adjacency=adjacency,
        alpha=alpha,
        r_cap=r,
        medoid=start,
        build_kind="vamana",
    )


def check_prune_list(ds: VectorDataset, p: int, nbrs, alpha: float) -> None:
    """Assert the pruning postcondition on a neighbor list of p.

    Distances from p must be nondecreasing along the list, and any later
    neighbor v must not be alpha times closer to an earlier neighbor u than to
    p (otherwise u's turn would have discarded v).
    """
    nbrs = np.asarray(nbrs, dtype=np.int64)
    if nbrs.size < 2:
        return
    data = ds.data64
    diffs = data[nbrs] - data[p]
    d_p = np.einsum("ij,ij->i", diffs, diffs)
    if np.any(np.diff(d_p) < 0):
        raise GraphInvariantError(f"node {p}: neighbor distances not nondecreasing")
    a2 = alpha * alpha
    pts = data[nbrs]
    for u in range(nbrs.size - 1):
        sdiff = pts[u + 1 :] - pts[u]
        d_uv = np.einsum("ij,ij->i", sdiff, sdiff)
        if np.any(d_p[u + 1 :] >= a2 * d_uv):
            v = int(np.flatnonzero(d_p[u + 1 :] >= a2 * d_uv)[0]) + u + 1
            raise GraphInvariantError(
                f"node {p}: neighbor {int(nbrs[v])} should have been pruned by {int(nbrs[u])}"
            )


def check_structure(g: SngGraph) -> None:
    """Raise GraphInvariantError on self-loops, duplicates, range or cap breaches."""
    if not 0 <= g.medoid < g.n:
        raise GraphInvariantError(f"medoid {g.medoid} out of range")
    for i in range(g.n):
        nb = np.asarray(g.adjacency[i], dtype=np.int64)
        if nb.size == 0:
            continue
        if nb.min() < 0 or nb.max() >= g.n:
            raise GraphInvariantError(f"node {i}: neighbor id out of range")
        if np.any(nb == i):
            raise GraphInvariantError(f"node {i}: self-loop")
        if np.unique(nb).size != nb.size:
            raise GraphInvariantError(f"node {i}: duplicate neighbors")
        if g.r_cap is not None and nb.size > g.r_cap:
            raise GraphInvariantError(f"node {i}: degree {nb.size} exceeds cap {g.r_cap}")


def save_graph(path, g: SngGraph) -> None:
    """Write the binary graph format: SNG1 magic, header, then per-node records."""
    header = _HEADER.pack(
        _MAGIC, g.n, g.dim, 0 if g.r_cap is None else g.r_cap,
        g.alpha, g.medoid, _KIND_CODE[g.build_kind],
    )
    chunks = []
    for i in range(g.n):
        nb = np.asarray(g.adjacency[i], dtype=np.int64)
        rec = np.empty(1 + nb.size, dtype="<u4")
        rec[0] = nb.size
        rec[1:] = nb
        chunks.append(rec)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.concatenate(chunks).tobytes())


def load_graph(path) -> SngGraph:
    """Read the binary graph format, validating structure on the way in."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) >= 4 and raw[:4] != _MAGIC:
        raise BadMagicError(f"{path}: bad magic {raw[:4]!r}")
    if len(raw) < _HEADER.size:
        raise TruncatedGraphFileError(f"{path}: {len(raw)} bytes is too short for a header")
    magic, n, dim, r_cap_raw, alpha, med, kind_code = _HEADER.unpack_from(raw)
    if n < 1 or dim < 1:
        raise GraphInvariantError(f"{path}: header has n={n}, dim={dim}")
    if kind_code >= len(BUILD_KINDS):
        raise GraphInvariantError(f"{path}: unknown build kind code {kind_code}")
    if not alpha >= 1.0:
        raise GraphInvariantError(f"{path}: alpha must be >= 1, got {alpha}")
    body = raw[_HEADER.size :]
    if len(body) % 4:
        raise TruncatedGraphFileError(f"{path}: body is not whole 4-byte words")
    words = np.frombuffer(body, dtype="<u4")
    adjacency = []
    pos = 0
    for i in range(n):
        if pos >= words.size:
            raise TruncatedGraphFileError(f"{path}: missing record for node {i}")
        deg = int(words[pos])
        pos += 1
        if pos + deg > words.size:
            raise TruncatedGraphFileError(f"{path}: node {i} promises {deg} neighbors")
        adjacency.append(words[pos : pos + deg].astype(np.int64))
        pos += deg
    if pos != words.size:
        raise TruncatedGraphFileError(f"{path}: {words.size - pos} trailing words after node records")
    g = SngGraph(
        n=int(n),
        dim=int(dim),
        adjacency=adjacency,
        alpha=float(alpha),
        r_cap=None if r_cap_raw == 0 else int(r_cap_raw),
        medoid=int(med),
        build_kind=BUILD_KINDS[kind_code],
    )
    check_structure(g)
    return g
