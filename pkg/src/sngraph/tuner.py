"""Choosing the truncation parameter R from a cheap probe build.

The construction-cost model says the optimal cap scales like K' * ln(n) /
alpha^2, where K' is a data-dependent constant. The analytic tuner estimates
K' once: build a probe index with a cap so large it almost never binds
(ceil(n^(2/3))) at pruning parameter alpha1, read off the mean out-degree
r_bar, set K' = alpha1^2 * r_bar / ln(n), and round K' * ln(n) / alpha2^2 to
get R* for the target alpha2. A golden-section tuner that searches R against
measured recall is included as the slow reference it replaces.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from .dataset import GroundTruth, VectorDataset
from .graph import BuildParams, build_vamana, search_many
from .instrument import recall_at_k

__all__ = [
    "CostConstants",
    "TuneReport",
    "GoldenSectionReport",
    "construction_cost",
    "marginal_optimal_r",
    "probe_r_for",
    "optimize_r",
    "golden_section_tune",
]


@dataclass(frozen=True)
class CostConstants:
    """Implementation-dependent constants of the build-cost model (unitless
    defaults of 1; fitting them to measured builds is out of scope)."""

    c1: float = 1.0
    b1: float = 1.0
    c2: float = 1.0
    b2: float = 1.0
    c3: float = 1.0
    b3: float = 1.0

    def __post_init__(self) -> None:
        for name, v in asdict(self).items():
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and nonnegative, got {v}")


@dataclass(frozen=True)
class TuneReport:
    """Analytic tuning outcome.

    r_probe is the probe build's cap, r_bar its mean out-degree, k_prime the
    inferred scaling constant alpha1^2 * r_bar / ln(probe size), and r_star
    the recommended cap round(k_prime * ln(n) / alpha2^2) clamped to [1, n-1].
    """

    alpha1: float
    alpha2: float
    r_probe: int
    r_bar: float
    k_prime: float
    r_star: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def construction_cost(n: int, r: int, alpha: float, k: CostConstants = CostConstants()) -> float:
    """Modeled build cost n*(c1*R*ln n + b1 + c2*R^2*ln n/alpha + b2 + c3*alpha*R^3 + b3)."""
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if not alpha >= 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    ln_n = math.log(n)
    return n * (
        k.c1 * r * ln_n + k.b1
        + k.c2 * r * r * ln_n / alpha + k.b2
        + k.c3 * alpha * r ** 3 + k.b3
    )


def marginal_optimal_r(n: int, alpha: float, k_prime: float) -> int:
    """round(k_prime * ln(n) / alpha^2), clamped to [1, n-1]."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not alpha >= 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if not (math.isfinite(k_prime) and k_prime > 0):
        raise ValueError(f"k_prime must be positive and finite, got {k_prime}")
    r = round(k_prime * math.log(n) / (alpha * alpha))
    return int(min(max(r, 1), n - 1))


def probe_r_for(m: int) -> int:
    """ceil(m^(2/3)), with the float power corrected at exact cubes."""
    r = math.ceil(m ** (2.0 / 3.0))
    if (r - 1) ** 3 >= m * m:
        r -= 1
    return r


def optimize_r(
    ds: VectorDataset,
    alpha1: float,
    alpha2: float,
    seed: int = 42,
    probe_subsample: int | None = None,
) -> TuneReport:
    """Analytic R selection via one probe build.

    Builds the probe on the full dataset with cap ceil(n^(2/3)) at alpha1.
    ``probe_subsample=m`` instead probes a seeded m-point subsample with cap
    ceil(m^(2/3)) — K' then uses ln(m) and the returned r_star still targets
    the full n. The identity alpha1 == alpha2 => r_star == round(r_bar) holds
    exactly on the default (no-subsample) path.
    """
    if not alpha1 >= 1.0 or not alpha2 >= 1.0:
        raise ValueError(f"alpha1 and alpha2 must be >= 1, got {alpha1}, {alpha2}")
    n = ds.n
    if n < 8:
        raise ValueError(f"need n >= 8 to tune, got {n}")
    if probe_subsample is None or probe_subsample == n:
        probe, m = ds, n
    else:
        m = int(probe_subsample)
        if not 8 <= m <= n:
            raise ValueError(f"probe_subsample must be in [8, {n}], got {m}")
        pick = np.sort(np.random.default_rng(seed).choice(n, size=m, replace=False))
        probe = VectorDataset(ds.data[pick])
    r_probe = min(probe_r_for(m), m - 1)
    g = build_vamana(probe, BuildParams(alpha=alpha1, r=r_probe, seed=seed))
    r_bar = float(g.out_degrees().mean())
    k_prime = alpha1 * alpha1 * r_bar / math.log(m)
    return TuneReport(
        alpha1=float(alpha1),
        alpha2=float(alpha2),
        r_probe=int(r_probe),
        r_bar=r_bar,
        k_prime=k_prime,
        r_star=marginal_optimal_r(n, alpha2, k_prime),
    )


@dataclass(frozen=True)
class GoldenSectionReport:
    """Search-based tuning outcome: chosen cap, recall there, and every
    (r, recall, build_seconds) evaluation in the order performed."""

    r_star: int
    recall: float
    evaluations: tuple

    def to_json(self) -> str:
        return json.dumps(
            {
                "r_star": self.r_star,
                "recall": self.recall,
                "evaluations": [list(e) for e in self.evaluations],
            },
            indent=2,
            sort_keys=True,
        )


def golden_section_tune(
    ds: VectorDataset,
    queries,
    gt: GroundTruth,
    alpha: float,
    l_search: int,
    k: int,
    r_lo: int,
    r_hi: int,
    seed: int = 42,
    threads: int = 1,
) -> GoldenSectionReport:
    """Reference tuner: golden-section over the cap R, scoring each R by
    recall@k of a full build at fixed beam width (a fixed latency budget).

    Shrinks [r_lo, r_hi] until its width is <= 4, then returns the best
    evaluated R (ties to the smaller, sparser cap). Each probe is a complete
    build plus a query sweep, which is exactly the cost the analytic tuner
    avoids.
    """
    if not 1 <= r_lo < r_hi < ds.n:
        raise ValueError(f"need 1 <= r_lo < r_hi < n, got [{r_lo}, {r_hi}], n={ds.n}")
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    cache: dict[int, float] = {}
    evals: list[tuple[int, float, float]] = []

    def score(r: int) -> float:
        if r not in cache:
            t0 = time.perf_counter()
            g = build_vamana(ds, BuildParams(alpha=alpha, r=r, seed=seed))
            ids, _, _ = search_many(g, ds, queries, g.medoid, l=l_search, k=k, threads=threads)
            cache[r] = recall_at_k(ids, gt, k)
            evals.append((r, cache[r], time.perf_counter() - t0))
        return cache[r]

    a, b = r_lo, r_hi
    while b - a > 4:
        h = b - a
        c = b - round(invphi * h)
        d = a + round(invphi * h)
        if c >= d:  # narrow interval: force distinct interior points
            c = a + h // 3
            d = b - h // 3
        if score(c) >= score(d):  # maximizing; ties keep the left (smaller R) side
            b = d
        else:
            a = c
    for r in range(a, b + 1):
        score(r)
    best = min(cache, key=lambda r: (-cache[r], r))
    return GoldenSectionReport(r_star=int(best), recall=float(cache[best]), evaluations=tuple(evals))
