"""Immutable d-regular graphs and the distance/ball/cycle primitives on them.

A :class:`RegularGraph` stores its ``m = nd/2`` edges as sorted pairs
``(u, v)`` with ``u < v``, indexed lexicographically, and a dense ``(n, d)``
neighbour table whose rows are sorted ascending. That row order is the vertex
ordering used by the exploration process in :mod:`percolab.explore`.
"""

import math
from collections import deque

import numpy as np

INF = math.inf


class GraphFormatError(ValueError):
    pass


class CycleOverflowError(RuntimeError):
    pass


class VertexSet:
    """A subset of ``range(n)`` backed by a boolean membership array."""

    __slots__ = ("_bits", "_size")

    def __init__(self, bits):
        bits = np.asarray(bits, dtype=bool)
        bits.setflags(write=False)
        self._bits = bits
        self._size = int(np.count_nonzero(bits))

    @classmethod
    def from_iterable(cls, n, vertices):
        bits = np.zeros(n, dtype=bool)
        idx = np.fromiter((int(v) for v in vertices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise IndexError("vertex out of range")
        bits[idx] = True
        return cls(bits)

    @classmethod
    def empty(cls, n):
        return cls(np.zeros(n, dtype=bool))

    @classmethod
    def full(cls, n):
        return cls(np.ones(n, dtype=bool))

    @property
    def n(self):
        return self._bits.size

    @property
    def bits(self):
        return self._bits

    def indices(self):
        return np.flatnonzero(self._bits)

    def complement(self):
        return VertexSet(~self._bits)

    def __len__(self):
        return self._size

    def __contains__(self, v):
        return 0 <= v < self._bits.size and bool(self._bits[v])

    def __iter__(self):
        return iter(self.indices().tolist())

    def __eq__(self, other):
        if isinstance(other, VertexSet):
            return self.n == other.n and bool(np.array_equal(self._bits, other._bits))
        if isinstance(other, (set, frozenset)):
            return set(self) == other
        return NotImplemented

    def __le__(self, other):
        return bool(np.all(~self._bits | other._bits))

    def __or__(self, other):
        return VertexSet(self._bits | other._bits)

    def __and__(self, other):
        return VertexSet(self._bits & other._bits)

    def __sub__(self, other):
        return VertexSet(self._bits & ~other._bits)

    def __hash__(self):
        return hash(self._bits.tobytes())

    def __repr__(self):
        shown = self.indices()[:10].tolist()
        more = ", ..." if self._size > 10 else ""
        return f"VertexSet(n={self.n}, size={self._size}, {shown}{more})"


def as_bits(n, u_set):
    """Membership array for a VertexSet, a boolean mask, or any iterable of vertices."""
    if isinstance(u_set, VertexSet):
        if u_set.n != n:
            raise ValueError("vertex set belongs to a graph of different order")
        return u_set.bits
    if isinstance(u_set, np.ndarray) and u_set.dtype == bool:
        if u_set.shape != (n,):
            raise ValueError(f"boolean membership array must have shape ({n},)")
        return u_set
    return VertexSet.from_iterable(n, u_set).bits


class RegularGraph:
    """A simple d-regular graph on vertices ``0..n-1``.

    Parameters
    ----------
    n : int
        Number of vertices.
    d : int
        Common degree, at least 3.
    edges : array_like of shape (m, 2)
        Undirected edges in any order and orientation. They are normalised
        to ``u < v`` and sorted, which fixes the edge indices.
    """

    def __init__(self, n, d, edges):
        n, d = int(n), int(d)
        if n < 1:
            raise GraphFormatError("n must be positive")
        if d < 3:
            raise GraphFormatError("degree must be at least 3")
        if (n * d) % 2:
            raise GraphFormatError("n*d must be even")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        m = n * d // 2
        if e.shape[0] != m:
            raise GraphFormatError(f"expected {m} edges for n={n}, d={d}, got {e.shape[0]}")
        if e.size and (e.min() < 0 or e.max() >= n):
            raise GraphFormatError("edge endpoint out of range")
        e = np.sort(e, axis=1)
        if np.any(e[:, 0] == e[:, 1]):
            raise GraphFormatError("self-loop")
        order = np.lexsort((e[:, 1], e[:, 0]))
        e = e[order]
        keys = e[:, 0] * n + e[:, 1]
        if np.any(keys[1:] == keys[:-1]):
            raise GraphFormatError("parallel edge")
        deg = np.bincount(e.ravel(), minlength=n)
        if np.any(deg != d):
            bad = int(np.flatnonzero(deg != d)[0])
            raise GraphFormatError(f"vertex {bad} has degree {deg[bad]}, expected {d}")

        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        half = np.lexsort((dst, src))
        adj = dst[half].reshape(n, d)
        adj_eid = eid[half].reshape(n, d)
        for arr in (e, keys, adj, adj_eid):
            arr.setflags(write=False)

        self.n = n
        self.d = d
        self.m = m
        self.edges = e
        self.adj = adj
        self.adj_eid = adj_eid
        self._keys = keys
        # plain lists for the tight Python loops in explore/certify
        self.neighbors = adj.tolist()
        self.neighbor_edges = adj_eid.tolist()

    @classmethod
    def from_edges(cls, edges, n=None):
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if n is None:
            n = int(e.max()) + 1
        if n == 0 or 2 * e.shape[0] % n:
            raise GraphFormatError("edge list is not regular")
        return cls(n, 2 * e.shape[0] // n, e)

    def edge_index(self, u, v):
        """Index of edge {u, v}; raises KeyError if absent."""
        u, v = (u, v) if u < v else (v, u)
        key = u * self.n + v
        i = int(np.searchsorted(self._keys, key))
        if i >= self.m or self._keys[i] != key:
            raise KeyError((u, v))
        return i

    def has_edge(self, u, v):
        try:
            self.edge_index(u, v)
        except KeyError:
            return False
        return True

    def check_vertex(self, v):
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range for n={self.n}")

    def to_text(self):
        lines = [f"{self.n} {self.d} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in self.edges.tolist())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise GraphFormatError("empty graph file")
        try:
            n, d, m = (int(x) for x in lines[0].split(" "))
        except ValueError as exc:
            raise GraphFormatError(f"bad header line: {lines[0]!r}") from exc
        if len(lines) != m + 1:
            raise GraphFormatError(f"header promises {m} edges, file has {len(lines) - 1}")
        edges = np.empty((m, 2), dtype=np.int64)
        for i, line in enumerate(lines[1:]):
            parts = line.split(" ")
            if len(parts) != 2:
                raise GraphFormatError(f"bad edge line {i + 2}: {line!r}")
            edges[i] = int(parts[0]), int(parts[1])
        if m and np.any(edges[:, 0] >= edges[:, 1]):
            raise GraphFormatError("edges must be written with u < v")
        if m > 1:
            keys = edges[:, 0] * n + edges[:, 1]
            if np.any(np.diff(keys) <= 0):
                raise GraphFormatError("edges must be sorted lexicographically")
        return cls(n, d, edges)

    def write(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_text())

    @classmethod
    def read(cls, path):
        with open(path, newline="") as fh:
            return cls.from_text(fh.read())

    def __eq__(self, other):
        if not isinstance(other, RegularGraph):
            return NotImplemented
        return self.n == other.n and self.d == other.d and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.d, self.edges.tobytes()))

    def __repr__(self):
        return f"RegularGraph(n={self.n}, d={self.d}, m={self.m})"


def bfs_distances(g, sources, max_depth=None):
    """Multi-source BFS over the full graph.

    Returns an int array of distances with -1 for vertices not reached
    (unreachable, or farther than ``max_depth``).
    """
    dist = np.full(g.n, -1, dtype=np.int64)
    frontier = np.unique(np.fromiter((int(s) for s in sources), dtype=np.int64))
    if frontier.size == 0:
        return dist
    dist[frontier] = 0
    depth = 0
    while frontier.size and (max_depth is None or depth < max_depth):
        depth += 1
        nxt = g.adj[frontier].ravel()
        nxt = np.unique(nxt[dist[nxt] < 0])
        dist[nxt] = depth
        frontier = nxt
    return dist


def ball(g, v, r):
    g.check_vertex(v)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    return VertexSet(bfs_distances(g, [v], max_depth=r) >= 0)


def distance(g, u, v):
    """Shortest-path length between u and v, or ``INF`` if disconnected."""
    g.check_vertex(u)
    g.check_vertex(v)
    if u == v:
        return 0
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[u] = 0
    frontier = np.array([u])
    depth = 0
    while frontier.size:
        depth += 1
        nxt = g.adj[frontier].ravel()
        nxt = np.unique(nxt[dist[nxt] < 0])
        if np.any(nxt == v):
            return depth
        dist[nxt] = depth
        frontier = nxt
    return INF


def distance_to_set(g, w_set):
    """Per-vertex distance to the nearest member of ``w_set`` (-1 if none reachable)."""
    bits = as_bits(g.n, w_set)
    return bfs_distances(g, np.flatnonzero(bits))


def edge_boundary(g, u_set):
    """Number of edges with exactly one endpoint in ``u_set``."""
    bits = as_bits(g.n, u_set)
    return int(np.count_nonzero(bits[g.edges[:, 0]] != bits[g.edges[:, 1]]))


def internal_edges(g, u_set):
    """Number of edges with both endpoints in ``u_set``."""
    bits = as_bits(g.n, u_set)
    return int(np.count_nonzero(bits[g.edges[:, 0]] & bits[g.edges[:, 1]]))


def component_labels(g):
    """Connected-component label per vertex of the full graph (smallest member)."""
    labels = np.full(g.n, -1, dtype=np.int64)
    for s in range(g.n):
        if labels[s] >= 0:
            continue
        reached = bfs_distances(g, [s]) >= 0
        labels[reached] = s
    return labels


def is_connected(g):
    return bool(np.all(bfs_distances(g, [0]) >= 0))


def is_bipartite(g):
    colour = [-1] * g.n
    nbrs = g.neighbors
    for s in range(g.n):
        if colour[s] >= 0:
            continue
        colour[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in nbrs[v]:
                if colour[w] < 0:
                    colour[w] = 1 - colour[v]
                    queue.append(w)
                elif colour[w] == colour[v]:
                    return False
    return True


def tree_ball_size(d, r):
    """Size of the radius-r ball in the infinite d-regular tree."""
    if r <= 0:
        return 1
    return 1 + d * ((d - 1) ** r - 1) // (d - 2)


def short_cycles(g, max_len, cap=10**6):
    """Vertex sets of all simple cycles of length at most ``max_len``.

    Each cycle is found by a depth-first search rooted at its smallest vertex
    that only visits larger vertices; the two traversal directions and
    distinct cycles on the same vertex set collapse to one frozenset.
    Raises CycleOverflowError once more than ``cap`` distinct sets are seen.
    """
    if max_len < 3:
        raise ValueError("max_len must be at least 3")
    nbrs = g.neighbors
    found = set()
    for s in range(g.n):
        path = [s]
        on_path = {s}
        # explicit stack of neighbour iterators avoids recursion limits
        stack = [iter(nbrs[s])]
        while stack:
            w = next(stack[-1], None)
            if w is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if w == s:
                if len(path) >= 3 and path[1] < path[-1]:
                    found.add(frozenset(path))
                    if len(found) > cap:
                        raise CycleOverflowError(f"more than {cap} short cycles")
                continue
            if w < s or w in on_path or len(path) >= max_len:
                continue
            path.append(w)
            on_path.add(w)
            stack.append(iter(nbrs[w]))
    return sorted(found, key=lambda c: (len(c), sorted(c)))


def girth_and_cycle_vertices(g, max_len, cap=10**6):
    """Girth (``INF`` if above ``max_len``) and the short cycles as vertex sets."""
    cycles = short_cycles(g, max_len, cap=cap)
    girth = min((len(c) for c in cycles), default=INF)
    return girth, cycles


def girth(g, max_len=None):
    """Length of a shortest cycle (``INF`` if none of length <= max_len).

    BFS from every vertex; a non-tree edge between depths a and b closes a
    cycle of length at most a + b + 1. Searches stop at half the best
    length found so far.
    """
    best = INF if max_len is None else max_len + 1
    nbrs = g.neighbors
    for s in range(g.n):
        dist = {s: 0}
        parent = {s: -1}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            if 2 * dist[x] + 1 >= best:
                break
            for w in nbrs[x]:
                if w not in dist:
                    dist[w] = dist[x] + 1
                    parent[w] = x
                    queue.append(w)
                elif parent[x] != w:
                    best = min(best, dist[x] + dist[w] + 1)
    if max_len is not None and best > max_len:
        return INF
    return best
