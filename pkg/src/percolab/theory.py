"""Closed-form and numerical predictions for percolation on d-regular graphs.

Covers the extinction probability ``q`` of a Bin(d-1, p) Galton-Watson
process, the probability ``y`` that the root of the infinite d-regular tree
lies in an infinite cluster, the size thresholds that govern component sizes
at ``p = lambda/(d-1)``, and a tree-cluster sampler used as an oracle.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from .rng import TAG_GW, make_rng, mix_seed

DEFAULT_TOL = 1e-13


def _check_dp(d, p):
    if int(d) != d or d < 3:
        raise ValueError(f"d must be an integer >= 3, got {d}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")


def extinction_residual(d, p, q):
    return (1.0 - p + p * q) ** (d - 1) - q


def solve_extinction(d, p, tol=DEFAULT_TOL):
    """Smallest root of ``q = (1 - p + p q)^(d-1)`` in [0, 1].

    Returns exactly 1.0 when ``p (d-1) <= 1``. Otherwise bisects
    ``f(q) = (1-p+pq)^(d-1) - q`` between 0 (where f > 0) and a point just
    below 1 where f < 0, then polishes with damped fixed-point steps.
    """
    _check_dp(d, p)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if p * (d - 1) <= 1.0:
        return 1.0
    if p == 1.0:
        return 0.0

    def f(q):
        return extinction_residual(d, p, q)

    lo = 0.0
    h = 0.5
    while f(1.0 - h) >= 0.0:
        h *= 0.5
        if h < 1e-12:
            # root within float resolution of 1: second-order expansion of
            # f(1-h) = -(k p - 1) h + C(k, 2) p^2 h^2 + O(h^3), k = d-1
            k = d - 1
            return 1.0 - (k * p - 1.0) / (0.5 * k * (k - 1) * p * p)
    hi = 1.0 - h
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    q = lo if abs(f(lo)) <= abs(f(hi)) else hi

    # the map q -> (1-p+pq)^(d-1) contracts near the root, so half-steps
    # toward its image cannot overshoot
    for _ in range(64):
        if abs(f(q)) <= tol * 1e-3:
            break
        nxt = 0.5 * q + 0.5 * (1.0 - p + p * q) ** (d - 1)
        if abs(f(nxt)) >= abs(f(q)):
            break
        q = nxt

    if q >= 1.0 - 10 * tol:
        raise ArithmeticError("root finder collapsed onto the trivial root q = 1")
    if abs(f(q)) > tol:
        raise ArithmeticError(f"residual {abs(f(q)):.3g} exceeds tol {tol:.3g}")
    return q


def survival(d, p, tol=DEFAULT_TOL):
    """Probability that the root of the infinite d-regular tree percolates.

    Evaluates both ``1 - (1-p+pq)^d`` and ``1 - q(1-p) - p q^2`` and raises
    if they disagree by more than 1e-12.
    """
    q = solve_extinction(d, p, tol)
    if q == 1.0:
        return 0.0
    y_power = 1.0 - (1.0 - p + p * q) ** d
    y_quadratic = 1.0 - q * (1.0 - p) - p * q * q
    if abs(y_power - y_quadratic) > 1e-12:
        raise ArithmeticError(f"survival forms disagree: {y_power!r} vs {y_quadratic!r}")
    return y_power


def survival_forms(d, p, tol=DEFAULT_TOL):
    """Both closed forms of the survival probability, unchecked."""
    q = solve_extinction(d, p, tol)
    return 1.0 - (1.0 - p + p * q) ** d, 1.0 - q * (1.0 - p) - p * q * q


@dataclass(frozen=True)
class TheoryParams:
    d: int
    lam: float
    p: float
    q: float
    y: float

    @classmethod
    def from_lambda(cls, d, lam, tol=DEFAULT_TOL):
        if not 0.0 <= lam <= d - 1:
            raise ValueError("lambda must lie in [0, d-1]")
        p = lam / (d - 1)
        return cls(d=d, lam=lam, p=p, q=solve_extinction(d, p, tol), y=survival(d, p, tol))


def default_delta(lam):
    return min(0.1, (lam - 1.0) / 2.0)


@dataclass(frozen=True)
class TheoremConstants:
    """Thresholds for one (n, d, lambda) instance plus the free constants.

    ``gap_low`` and ``small_cap`` are both ``5 lambda ln n / (lambda-1)^2``;
    ``gap_high`` is ``(ln n)^C``. Thresholds are kept real-valued and
    compared directly against integer component sizes.
    """

    n: int
    d: int
    lam: float
    c: float
    C: float
    alpha: float
    b: float
    delta: float
    p: float
    p1: float
    p2: float
    gap_low: float
    gap_high: float
    small_cap: float
    ball_target: float
    spread_radius: int
    cycle_radius: int

    def as_dict(self):
        return asdict(self)


def theorem_constants(n, d, lam, c=0.1, C=3.0, alpha=0.02, b=0.0, delta=None):
    if n < 3:
        raise ValueError("n must be at least 3")
    if not 1.0 < lam < d - 1:
        raise ValueError("need 1 < lambda < d-1")
    if delta is None:
        delta = default_delta(lam)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if lam - delta <= 1.0:
        raise ValueError(f"need lambda - delta > 1, got {lam} - {delta}")
    if c <= 0:
        raise ValueError("c must be positive")
    p = lam / (d - 1)
    p2 = delta / (d - 1)
    p1 = 1.0 - (1.0 - p) / (1.0 - p2)
    log_n = math.log(n)
    low = 5.0 * lam * log_n / (lam - 1.0) ** 2
    return TheoremConstants(
        n=n, d=d, lam=lam, c=c, C=C, alpha=alpha, b=b, delta=delta,
        p=p, p1=p1, p2=p2,
        gap_low=low,
        gap_high=log_n ** C,
        small_cap=low,
        ball_target=10.0 * lam * log_n / (lam - 1.0) ** 2,
        spread_radius=math.ceil(2.0 * math.log(log_n)) if log_n > 1 else 0,
        cycle_radius=math.ceil(1.0 / (16.0 * c)),
    )


def chernoff_bound(n, p, t):
    """Two-sided binomial tail bound ``2 exp(-t^2 / (3 n p))`` for 0 < t <= np/2."""
    if not 0 < t <= n * p / 2:
        raise ValueError(f"t must lie in (0, np/2] = (0, {n * p / 2}]")
    return 2.0 * math.exp(-t * t / (3.0 * n * p))


def gap_tail_prediction(k, lam):
    """Upper bound ``exp(-(lambda-1)^2 k / (4 lambda))`` on P(|C(v)| = k)."""
    if lam <= 1:
        raise ValueError("lambda must exceed 1")
    return math.exp(-((lam - 1.0) ** 2) * k / (4.0 * lam))


def _gw_run(rng, d, p, size_cap, samples):
    # generation-synchronous breadth-first growth: the next generation of
    # z vertices with k open child slots each is Bin(z*k, p) in total
    sizes = np.ones(samples, dtype=np.int64)
    gen = rng.binomial(d, p, size=samples).astype(np.int64)
    sizes += gen
    active = (gen > 0) & (sizes < size_cap)
    while np.any(active):
        idx = np.flatnonzero(active)
        nxt = rng.binomial(gen[idx] * (d - 1), p).astype(np.int64)
        gen[:] = 0
        gen[idx] = nxt
        sizes[idx] += nxt
        active = (gen > 0) & (sizes < size_cap)
    return sizes, sizes >= size_cap


def gw_cluster_sample(d, p, size_cap, seed):
    """One percolation cluster of the rooted d-regular tree.

    The root gets Bin(d, p) children and every later vertex Bin(d-1, p).
    Growth stops at extinction or once the size reaches ``size_cap``; the
    second return value says which (True means the cap was reached).
    """
    _check_dp(d, p)
    if size_cap < 1:
        raise ValueError("size_cap must be at least 1")
    if size_cap == 1:
        return 1, True
    sizes, survived = _gw_run(make_rng(seed), d, p, size_cap, 1)
    return int(sizes[0]), bool(survived[0])


def gw_cluster_samples(d, p, size_cap, samples, seed):
    """Batch version of :func:`gw_cluster_sample`; returns (sizes, survived) arrays.

    The batch draws from one stream seeded by ``mix_seed(seed, TAG_GW)``,
    so it is not the concatenation of single-sample calls.
    """
    _check_dp(d, p)
    if size_cap < 1:
        raise ValueError("size_cap must be at least 1")
    if size_cap == 1:
        return np.ones(samples, dtype=np.int64), np.ones(samples, dtype=bool)
    return _gw_run(make_rng(mix_seed(seed, TAG_GW)), d, p, size_cap, samples)
