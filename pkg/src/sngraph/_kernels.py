"""Compiled inner loops for graph construction and search.

The beam search and the pruning sweep run millions of tiny steps whose cost in
interpreted numpy is all call overhead, so both are jitted with numba when it
is available (``HAVE_NUMBA``); graph.py falls back to equivalent numpy loops
otherwise. Adjacency is passed as flat arrays (``flat[starts[v] : starts[v] +
lens[v]]`` is v's list) so one kernel serves both the padded build buffer and
finished graphs.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True, nogil=True)
def greedy_core(data, flat, starts, lens, query, start, l, seen, tick, visited_buf, path_buf):
    """Best-first beam search; see graph.greedy_search for the contract.

    Keeps the l best discovered nodes sorted by (distance, id) and expands the
    first unexpanded entry until none is left. Returns the candidate arrays and
    the counts (n_candidates, n_visited, n_path); expansion order and the
    strictly-improving path are written to the two buffers.
    """
    dim = data.shape[1]
    cand_ids = np.empty(l, dtype=np.int64)
    cand_d = np.empty(l, dtype=np.float64)
    expanded = np.zeros(l, dtype=np.bool_)
    dd = 0.0
    for c in range(dim):
        diff = data[start, c] - query[c]
        dd += diff * diff
    cand_ids[0] = start
    cand_d[0] = dd
    ncand = 1
    unexp = 1
    seen[start] = tick
    nvis = 0
    path_buf[0] = start
    npath = 1
    best = dd
    while unexp > 0:
        i = 0
        while expanded[i]:
            i += 1
        node = cand_ids[i]
        expanded[i] = True
        unexp -= 1
        visited_buf[nvis] = node
        nvis += 1
        for e in range(starts[node], starts[node] + lens[node]):
            nb = flat[e]
            if seen[nb] == tick:
                continue
            seen[nb] = tick
            dd = 0.0
            for c in range(dim):
                diff = data[nb, c] - query[c]
                dd += diff * diff
            if ncand == l:
                # full list: skip entrants that would be cut straight away
                if dd > cand_d[l - 1] or (dd == cand_d[l - 1] and nb > cand_ids[l - 1]):
                    continue
                if not expanded[l - 1]:
                    unexp -= 1
                end = l - 1
            else:
                end = ncand
                ncand += 1
            lo = 0
            hi = end
            while lo < hi:
                mid = (lo + hi) >> 1
                if cand_d[mid] < dd or (cand_d[mid] == dd and cand_ids[mid] < nb):
                    lo = mid + 1
                else:
                    hi = mid
            for j in range(end, lo, -1):
                cand_ids[j] = cand_ids[j - 1]
                cand_d[j] = cand_d[j - 1]
                expanded[j] = expanded[j - 1]
            cand_ids[lo] = nb
            cand_d[lo] = dd
            expanded[lo] = False
            unexp += 1
        if cand_d[0] < best:
            best = cand_d[0]
            path_buf[npath] = cand_ids[0]
            npath += 1
    return cand_ids, cand_d, ncand, nvis, npath


@njit(cache=True, nogil=True)
def prune_core(data, cand, d_p, alpha2, r, out):
    """Sweep of the pruning rule over candidates presorted by (distance, id).

    Each survivor in order becomes an edge (written to ``out``) and kills every
    later candidate at least alpha times closer to it than to the owner.
    Returns the number of edges written.
    """
    m = cand.shape[0]
    dim = data.shape[1]
    alive = np.ones(m, dtype=np.bool_)
    nout = 0
    for i in range(m):
        if not alive[i]:
            continue
        star = cand[i]
        out[nout] = star
        nout += 1
        if nout == r:
            break
        for j in range(i + 1, m):
            if not alive[j]:
                continue
            dd = 0.0
            for c in range(dim):
                diff = data[cand[j], c] - data[star, c]
                dd += diff * diff
            if d_p[j] >= alpha2 * dd:
                alive[j] = False
    return nout
