"""Distance kernels, random ball geometry, and the candidate-pruning probability model.

Everything here is exact math or seeded sampling; no graph state. Distances are
squared Euclidean (a monotone surrogate for Euclidean, so argmin/comparisons are
unchanged) and are always accumulated in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "sq_euclidean",
    "reg_inc_beta",
    "PruneGeometry",
    "pruning_probability",
    "pruning_probability_mc",
    "pruning_probability_bounds",
    "sample_uniform_ball",
]

_BETACF_MAXIT = 400
_BETACF_EPS = 3e-16
_BETACF_FPMIN = 1e-300


def sq_euclidean(a, b) -> float:
    """Squared Euclidean distance between two vectors, accumulated in float64."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"expected two 1-d vectors of equal length, got {a.shape} and {b.shape}")
    d = a - b
    return float(np.dot(d, d))


def _betacf(a: float, b: float, x: float) -> float:
    # Continued fraction for the incomplete beta function (modified Lentz scheme).
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETACF_FPMIN:
        d = _BETACF_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_FPMIN:
            d = _BETACF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETACF_FPMIN:
            c = _BETACF_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_FPMIN:
            d = _BETACF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETACF_FPMIN:
            c = _BETACF_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETACF_EPS:
            return h
    raise RuntimeError(f"incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}")


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function I_x(a, b).

    Evaluated with the standard continued-fraction expansion, switching to the
    symmetric form I_x(a, b) = 1 - I_{1-x}(b, a) when x is past the pivot
    (a + 1) / (a + b + 2) so the fraction converges fast on both sides.
    """
    x = float(x)
    a = float(a)
    b = float(b)
    if not (a > 0.0 and b > 0.0):
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got x={x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        gammaln(a + b) - gammaln(a) - gammaln(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


@dataclass(frozen=True)
class PruneGeometry:
    """Geometry of one pruning step inside a uniform ball.

    ``ratio`` is rho_t / rho_0: the distance from the owner to its nearest
    unprocessed point, over the ball radius. ``dim`` is the ambient dimension.
    """

    ratio: float
    dim: int

    def __post_init__(self) -> None:
        if not 0.0 < self.ratio < 1.0:
            raise ValueError(f"ratio must lie strictly in (0, 1), got {self.ratio}")
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"dim must be an integer >= 2, got {self.dim}")


def pruning_probability(geom: PruneGeometry, bisector: bool = True) -> float:
    """Probability that a surviving candidate is pruned by the nearest-neighbor step.

    Setting: the owner sits at the center of a ball of radius rho_0 filled with
    uniform points, its nearest unprocessed point is at distance rho_t, and a
    candidate is uniform on the shell beyond rho_t. The candidate is pruned when
    it is closer to the nearest point than to the owner, i.e. it lies beyond the
    bisecting hyperplane of the two. Integrating the spherical caps gives

        pi = [I_arg((d+1)/2, 1/2) - ratio^d I_{3/4}((d+1)/2, 1/2)]
             / (2 (1 - ratio^d))

    where ``arg = 1 - (ratio/2)^2`` places the cap at the bisector (half the
    nearest-neighbor distance). ``bisector=False`` instead uses the cruder
    ``arg = 1 - ratio^2`` (cap at the full distance), kept only for comparison;
    the Monte-Carlo estimate arbitrates between the two.
    """
    a = (geom.dim + 1) / 2.0
    b = 0.5
    r = geom.ratio
    if bisector:
        arg = 1.0 - (r / 2.0) ** 2
    else:
        arg = 1.0 - r ** 2
    i_inner = reg_inc_beta(0.75, a, b)
    num = reg_inc_beta(arg, a, b) - (r ** geom.dim) * i_inner
    den = 2.0 * (1.0 - r ** geom.dim)
    return num / den


def pruning_probability_bounds(dim: int) -> tuple[float, float]:
    """Open interval (I_{3/4}((d+1)/2, 1/2) / 2, 1/2) that pruning_probability lies in."""
    lo = reg_inc_beta(0.75, (dim + 1) / 2.0, 0.5) / 2.0
    return lo, 0.5


def pruning_probability_mc(
    geom: PruneGeometry, n_samples: int = 100_000, seed: int = 0
) -> tuple[float, int]:
    """Monte-Carlo estimate of pruning_probability by rejection sampling.

    Draws ``n_samples`` points uniformly in the unit ball, keeps those farther
    than ``ratio`` from the center (the candidates still unprocessed), and
    counts the kept fraction that is strictly closer to the nearest point at
    (0, ..., 0, ratio) than to the owner at the origin. Returns the estimated
    probability and the number of kept samples (for a binomial standard error).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    pts = sample_uniform_ball(n_samples, geom.dim, 1.0, seed)
    star = np.zeros(geom.dim)
    star[-1] = geom.ratio
    d_owner = np.einsum("ij,ij->i", pts, pts)
    diff = pts - star
    d_star = np.einsum("ij,ij->i", diff, diff)
    kept = d_owner > geom.ratio ** 2
    n_kept = int(np.count_nonzero(kept))
    if n_kept == 0:
        raise ValueError("rejection sampling kept no points; increase n_samples")
    pruned = np.count_nonzero(d_owner[kept] > d_star[kept])
    return float(pruned) / n_kept, n_kept


def sample_uniform_ball(n: int, d: int, rho0: float, seed: int) -> np.ndarray:
    """Sample n points uniformly from the d-ball of radius rho0 (seeded, float64).

    Directions come from normalized Gaussians; radii from rho0 * U^(1/d), which
    is the inverse CDF of the radial law inside the ball.
    """
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if not rho0 > 0.0:
        raise ValueError(f"rho0 must be positive, got {rho0}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, d))
    norms = np.linalg.norm(g, axis=1)
    norms[norms == 0.0] = 1.0
    radii = rho0 * rng.random(n) ** (1.0 / d)
    return g * (radii / norms)[:, None]
