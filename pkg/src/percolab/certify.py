"""Checks for the expansion and local-sparsity hypotheses on a host graph.

Global edge expansion is certified exactly on small graphs and through the
spectral gap otherwise. Local sparsity is certified over connected vertex
sets only, by exhaustive enumeration up to a size bound. The remaining
checks (cycle spacing, ball growth, cycle-free balls) measure the
structural consequences used for the giant-component estimates.
"""

import json
import math
from collections import deque
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sps

from .graph import VertexSet, bfs_distances, girth, girth_and_cycle_vertices, is_bipartite, is_connected


class ConvergenceError(RuntimeError):
    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class DisconnectedGraphError(ValueError):
    pass


class EnumerationOverflow(RuntimeError):
    pass


EXACT_EXPANSION_MAX_N = 24


def adjacency_matrix(g):
    rows = np.concatenate([g.edges[:, 0], g.edges[:, 1]])
    cols = np.concatenate([g.edges[:, 1], g.edges[:, 0]])
    data = np.ones(rows.size, dtype=np.float64)
    return sps.csr_matrix((data, (rows, cols)), shape=(g.n, g.n))


def spectral_gap(g, tol=1e-8, max_iter=100_000, seed=0):
    """Second-largest adjacency eigenvalue by deflated power iteration.

    Iterates with ``A + d I`` (spectrum in [0, 2d]) on vectors kept
    orthogonal to the all-ones top eigenvector. Stops when the residual
    ``||A x - mu x||`` of the Rayleigh quotient ``mu`` is at most ``tol``.
    """
    if not is_connected(g):
        raise DisconnectedGraphError("spectral gap requires a connected graph")
    a = adjacency_matrix(g)
    x = np.random.default_rng(seed).standard_normal(g.n)
    x -= x.mean()
    x /= np.linalg.norm(x)
    mu = float("nan")
    for _ in range(max_iter):
        ax = a @ x
        mu = float(x @ ax)
        if np.linalg.norm(ax - mu * x) <= tol:
            return mu
        y = ax + g.d * x
        y -= y.mean()
        norm = np.linalg.norm(y)
        if norm == 0.0:
            # x lay in the eigenspace of -d (bipartite graph)
            return -float(g.d)
        x = y / norm
    raise ConvergenceError(f"power iteration did not reach tol={tol} in {max_iter} steps", mu)


def exact_expansion(g, return_witness=False):
    """Minimum of e(U, U^c)/|U| over nonempty U with |U| <= n/2 (n <= 24).

    All 2^n subsets are scored at once: the internal edge count of a set
    is built up from the set without its highest vertex.
    """
    n = g.n
    if n > EXACT_EXPANSION_MAX_N:
        raise ValueError(f"exhaustive expansion limited to n <= {EXACT_EXPANSION_MAX_N}, got {n}")
    nbr_masks = [sum(1 << w for w in g.neighbors[v]) for v in range(n)]
    total = 1 << n
    inside = np.zeros(total, dtype=np.int16)
    size = np.zeros(total, dtype=np.int8)
    for k in range(n):
        low = np.arange(1 << k, dtype=np.int64)
        inside[(1 << k):(1 << (k + 1))] = inside[:1 << k] + np.bitwise_count(low & nbr_masks[k])
        size[(1 << k):(1 << (k + 1))] = size[:1 << k] + 1
    boundary = g.d * size.astype(np.int32) - 2 * inside.astype(np.int32)
    best = None
    best_mask = None
    for s in range(1, n // 2 + 1):
        idx = np.flatnonzero(size == s)
        j = int(np.argmin(boundary[idx]))
        ratio = int(boundary[idx[j]]) / s
        if best is None or ratio < best:
            best, best_mask = ratio, int(idx[j])
    if return_witness:
        return best, VertexSet.from_iterable(n, [v for v in range(n) if best_mask >> v & 1])
    return best


@dataclass
class LocalDensity:
    """Maximum excess e(U) - |U| over connected U, per size |U| = s."""

    max_excess: dict
    witnesses: dict
    enumerated: int

    def satisfies(self, c, k=None):
        k = max(self.max_excess) if k is None else k
        return all(self.max_excess[s] <= c * s for s in self.max_excess if s <= k)

    def required_c(self):
        """Smallest c >= 0 with max_excess[s] <= c s for every enumerated s."""
        return max(0.0, max(ex / s for s, ex in self.max_excess.items()))


def local_density(g, k_max, cap=10**7):
    """Enumerate connected vertex sets of size <= k_max and record densities.

    Each connected set is generated exactly once, from its smallest vertex,
    by the extension-set scheme: a vertex may be added only if it is larger
    than the root and was not already adjacent to the current set when
    it was first offered. Raises EnumerationOverflow beyond ``cap`` sets.
    """
    if k_max < 3:
        raise ValueError("k_max must be at least 3")
    nbrs = [set(row) for row in g.neighbors]
    best = {s: -math.inf for s in range(1, k_max + 1)}
    witness = {}
    count = 0

    def extend(sub, sub_set, closed, ext, root, edges):
        nonlocal count
        count += 1
        if count > cap:
            raise EnumerationOverflow(f"more than {cap} connected subgraphs")
        s = len(sub)
        if edges - s > best[s]:
            best[s] = edges - s
            witness[s] = tuple(sorted(sub))
        if s == k_max:
            return
        ext = list(ext)
        while ext:
            w = ext.pop()
            new_ext = ext + [u for u in nbrs[w] if u > root and u not in closed]
            sub.append(w)
            sub_set.add(w)
            extend(sub, sub_set, closed | nbrs[w], new_ext, root, edges + len(nbrs[w] & sub_set))
            sub_set.discard(w)
            sub.pop()

    for v in range(g.n):
        start = [u for u in nbrs[v] if u > v]
        extend([v], {v}, nbrs[v] | {v}, start, v, 0)

    max_excess = {s: int(b) for s, b in best.items() if b > -math.inf}
    return LocalDensity(max_excess=max_excess, witnesses=witness, enumerated=count)


@dataclass
class SpacingResult:
    ok: bool
    witness: tuple = None  # (cycle_a, cycle_b, distance)


def cycle_spacing_check(g, L, cap=10**6):
    """True iff any two distinct cycles of length <= L are at distance >= L."""
    if L < 3:
        raise ValueError("L must be at least 3")
    _, cycles = girth_and_cycle_vertices(g, L, cap=cap)
    owner = {}
    for i, cyc in enumerate(cycles):
        for v in cyc:
            owner.setdefault(v, []).append(i)
    for i, cyc in enumerate(cycles):
        dist = bfs_distances(g, sorted(cyc), max_depth=L - 1)
        hits = []
        for x in np.flatnonzero(dist >= 0).tolist():
            for j in owner.get(x, ()):
                if j != i:
                    hits.append((int(dist[x]), j))
        if hits:
            delta, j = min(hits)
            return SpacingResult(False, (sorted(cyc), sorted(cycles[j]), delta))
    return SpacingResult(True, None)


def _ball_size_capped(nbrs, v, r, cap):
    seen = {v}
    frontier = [v]
    for _ in range(r):
        nxt = []
        for x in frontier:
            for w in nbrs[x]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        if len(seen) >= cap or not nxt:
            break
        frontier = nxt
    return min(len(seen), cap)


@dataclass
class BallGrowthResult:
    ok: bool
    worst_vertex: int
    worst_size: int
    threshold: float
    radius: int


def ball_growth_check(g, lam, radius=None):
    """Check |B(v, radius)| >= 10 lam ln n / (lam-1)^2 for every vertex.

    The default radius is ceil(2 ln ln n). Ball sizes are only counted up
    to the threshold, so ``worst_size`` is exact only when the check fails.
    """
    if lam <= 1:
        raise ValueError("lambda must exceed 1")
    log_n = math.log(g.n) if g.n > 1 else 0.0
    threshold = 10.0 * lam * log_n / (lam - 1.0) ** 2
    if radius is None:
        radius = math.ceil(2.0 * math.log(log_n)) if log_n > 1 else 0
    cap = max(1, math.ceil(threshold))
    worst_v, worst = 0, None
    for v in range(g.n):
        size = _ball_size_capped(g.neighbors, v, radius, cap)
        if worst is None or size < worst:
            worst_v, worst = v, size
    return BallGrowthResult(ok=worst >= threshold, worst_vertex=worst_v, worst_size=worst,
                            threshold=threshold, radius=radius)


@dataclass
class CycleFreeResult:
    vertices: VertexSet
    fraction: float
    bound: float
    radius: int

    @property
    def meets_bound(self):
        return self.fraction >= self.bound


def _ball_is_tree(nbrs, v, r):
    # BFS tree plus a search for any edge inside the ball that is not a tree edge
    parent = {v: -1}
    depth = {v: 0}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        if depth[x] == r:
            continue
        for w in nbrs[x]:
            if w not in depth:
                depth[w] = depth[x] + 1
                parent[w] = x
                queue.append(w)
    for x in depth:
        for w in nbrs[x]:
            if w in depth and x < w and parent[w] != x and parent[x] != w:
                return False
    return True


def cycle_free_vertices(g, r):
    """Vertices whose radius-r ball induces a tree, and how many there are."""
    if r < 1:
        raise ValueError("r must be at least 1")
    nbrs = g.neighbors
    bits = np.fromiter((_ball_is_tree(nbrs, v, r) for v in range(g.n)), dtype=bool, count=g.n)
    return CycleFreeResult(
        vertices=VertexSet(bits),
        fraction=float(bits.mean()),
        bound=1.0 - (g.d - 1) ** (-r),
        radius=r,
    )


@dataclass
class CertReport:
    n: int
    d: int
    connected: bool
    bipartite: bool
    lambda2: float = None
    b_spectral: float = None
    b_spectral_is_proxy: bool = True
    b_exact: float = None
    local_k: int = None
    max_excess: dict = None
    c_certified: float = None
    verified_pairs: list = None
    girth: object = None
    cycle_spacing_ok: dict = None
    cycle_spacing_witness: dict = None
    ball_growth: dict = None
    cycle_free: dict = None
    notes: list = field(default_factory=list)

    def to_dict(self):
        out = asdict(self)
        if out["girth"] == math.inf:
            out["girth"] = "inf"
        for key in ("max_excess", "cycle_spacing_ok", "cycle_spacing_witness"):
            if out[key] is not None:
                out[key] = {str(k): v for k, v in out[key].items()}
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def certify_graph(g, spectral=False, exact=False, local_k=None, cycle_spacing=None,
            ball_growth_lambda=None, ball_radius=None, cycle_free_radius=None,
            c_values=(0.1,), enum_cap=10**7, girth_max_len=None):
    """Run the requested checks and collect them in a :class:`CertReport`."""
    connected = is_connected(g)
    report = CertReport(n=g.n, d=g.d, connected=connected, bipartite=is_bipartite(g))
    if spectral:
        if connected:
            report.lambda2 = spectral_gap(g)
            report.b_spectral = (g.d - report.lambda2) / 2.0
        else:
            report.notes.append("spectral pass skipped: graph is disconnected")
    if exact:
        report.b_exact = exact_expansion(g)
    if local_k is not None:
        dens = local_density(g, local_k, cap=enum_cap)
        report.local_k = local_k
        report.max_excess = dens.max_excess
        report.c_certified = dens.required_c()
        report.verified_pairs = [[c, local_k] for c in c_values if dens.satisfies(c, local_k)]
    if cycle_spacing is not None:
        Ls = [cycle_spacing] if isinstance(cycle_spacing, int) else list(cycle_spacing)
        report.cycle_spacing_ok = {}
        report.cycle_spacing_witness = {}
        for L in Ls:
            res = cycle_spacing_check(g, L)
            report.cycle_spacing_ok[L] = res.ok
            report.cycle_spacing_witness[L] = list(res.witness) if res.witness else None
    report.girth = girth(g, girth_max_len)
    if ball_growth_lambda is not None:
        report.ball_growth = asdict(ball_growth_check(g, ball_growth_lambda, ball_radius))
    if cycle_free_radius is not None:
        res = cycle_free_vertices(g, cycle_free_radius)
        report.cycle_free = {"radius": res.radius, "count": len(res.vertices),
                             "fraction": res.fraction, "bound": res.bound}
    return report
