"""Random and structured d-regular graphs used as inputs and fixtures."""

from dataclasses import dataclass

import numpy as np

from .graph import GraphFormatError, RegularGraph
from .rng import make_rng

MODELS = ("random_regular", "complete", "petersen", "circulant", "prism", "adversarial_union")


class RetriesExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class GenSpec:
    model: str
    n: int
    d: int
    seed: int = 0
    max_retries: int = 10_000
    offsets: tuple = ()
    bridge_count: int = 1

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {MODELS}")
        if (self.n * self.d) % 2:
            raise ValueError("n*d must be even")
        if self.n < self.d + 1:
            raise ValueError("need n >= d+1")


def random_regular(n, d, seed, max_retries=10_000):
    """Random simple d-regular graph from the configuration model.

    All ``nd`` half-edge stubs are paired by one uniform random permutation.
    A pairing with a self-loop or a repeated edge is thrown away whole and the
    next permutation from the same stream is tried, so the result is exactly
    d-regular and a function of ``seed`` alone.
    """
    if (n * d) % 2:
        raise ValueError("n*d must be even")
    if n <= d:
        raise ValueError("need n > d")
    rng = make_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(max_retries):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        pairs.sort(axis=1)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        keys = np.sort(pairs[:, 0] * n + pairs[:, 1])
        if np.any(keys[1:] == keys[:-1]):
            continue
        return RegularGraph(n, d, pairs)
    raise RetriesExhausted(f"no simple pairing for n={n}, d={d} after {max_retries} attempts")


def complete(d):
    """K_{d+1}."""
    n = d + 1
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return RegularGraph(n, d, edges)


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return RegularGraph(10, 3, outer + spokes + inner)


def circulant(n, offsets):
    """Vertex i joined to i +- o (mod n) for each offset o.

    An offset equal to n/2 contributes one neighbour, every other offset two.
    """
    offsets = sorted({int(o) % n for o in offsets})
    if not offsets or 0 in offsets:
        raise GraphFormatError("offsets must be nonzero mod n")
    if any((n - o) % n in offsets and (n - o) % n != o for o in offsets):
        raise GraphFormatError("offsets o and n-o both given; edges would repeat")
    edges = set()
    for i in range(n):
        for o in offsets:
            j = (i + o) % n
            edges.add((min(i, j), max(i, j)))
    d = sum(1 if 2 * o == n else 2 for o in offsets)
    return RegularGraph(n, d, sorted(edges))


def prism(k):
    """Circular ladder C_k x K_2, a 3-regular graph on 2k vertices."""
    ring = [(i, (i + 1) % k) for i in range(k)]
    edges = ring + [(k + a, k + b) for a, b in ring] + [(i, k + i) for i in range(k)]
    return RegularGraph(2 * k, 3, edges)


def _disjoint_edges(g, count, rng):
    """``count`` pairwise vertex-disjoint edges of g, chosen at random."""
    used = np.zeros(g.n, dtype=bool)
    chosen = []
    for j in rng.permutation(g.m).tolist():
        u, v = g.edges[j].tolist()
        if used[u] or used[v]:
            continue
        used[u] = used[v] = True
        chosen.append((u, v))
        if len(chosen) == count:
            return chosen
    raise GraphFormatError(f"could not find {count} disjoint edges")


def adversarial_union(g1, g2, bridge_count, seed):
    """Two graphs joined by ``2 * bridge_count`` cross edges.

    Removes ``bridge_count`` vertex-disjoint edges ``(a, b)`` from ``g1`` and
    as many ``(x, y)`` from ``g2`` (shifted by ``g1.n``) and adds the cross
    edges ``(a, x)`` and ``(b, y)``. Degrees are preserved and the cut between
    the two halves has exactly ``2 * bridge_count`` edges.
    """
    if g1.d != g2.d:
        raise GraphFormatError("both graphs must have the same degree")
    if bridge_count < 1:
        raise ValueError("bridge_count must be at least 1")
    rng = make_rng(seed)
    cut1 = _disjoint_edges(g1, bridge_count, rng)
    cut2 = _disjoint_edges(g2, bridge_count, rng)
    off = g1.n
    removed1 = set(cut1)
    removed2 = set(cut2)
    edges = [tuple(e) for e in g1.edges.tolist() if tuple(e) not in removed1]
    edges += [(u + off, v + off) for u, v in g2.edges.tolist() if (u, v) not in removed2]
    for (a, b), (x, y) in zip(cut1, cut2):
        edges += [(a, x + off), (b, y + off)]
    return RegularGraph(g1.n + g2.n, g1.d, edges)


def generate(spec):
    """Build the graph described by a :class:`GenSpec`."""
    if spec.model == "random_regular":
        return random_regular(spec.n, spec.d, spec.seed, spec.max_retries)
    if spec.model == "complete":
        if spec.n != spec.d + 1:
            raise ValueError("complete graph needs n = d+1")
        return complete(spec.d)
    if spec.model == "petersen":
        if (spec.n, spec.d) != (10, 3):
            raise ValueError("petersen graph has n=10, d=3")
        return petersen()
    if spec.model == "prism":
        if spec.d != 3 or spec.n % 2:
            raise ValueError("prism needs d=3 and even n")
        return prism(spec.n // 2)
    if spec.model == "circulant":
        offsets = spec.offsets or _default_offsets(spec.n, spec.d)
        g = circulant(spec.n, offsets)
        if g.d != spec.d:
            raise ValueError(f"offsets {offsets} give degree {g.d}, not {spec.d}")
        return g
    # adversarial_union: two random d-regular halves of n/2 vertices each
    if spec.n % 2:
        raise ValueError("adversarial_union needs even n")
    half = spec.n // 2
    g1 = random_regular(half, spec.d, spec.seed, spec.max_retries)
    g2 = random_regular(half, spec.d, spec.seed ^ 0x5A5A5A5A, spec.max_retries)
    return adversarial_union(g1, g2, spec.bridge_count, spec.seed)


def _default_offsets(n, d):
    offsets = list(range(1, d // 2 + 1))
    if d % 2:
        if n % 2:
            raise ValueError("odd-degree circulant needs even n")
        offsets.append(n // 2)
    return tuple(offsets)
