"""Query-by-query exploration of percolation clusters.

The explorer keeps three disjoint vertex sets: ``S`` (finished), a FIFO
queue ``Q`` (being explored) and ``T`` (untouched). While ``Q`` is nonempty
its head ``v`` asks about the edge to its first neighbour in ``T``, in
ascending vertex order; a positive answer moves that neighbour to the tail of
``Q``. Once ``v`` has no unqueried edge into ``T`` it moves to ``S``. Every
edge is queried at most once.

Answers come either from a percolation mask (looked up by edge index) or
from a stream of bits consumed one per query.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graph import VertexSet, as_bits
from .percolate import EdgeMask, parallel_map
from .rng import TAG_EXPLORE, TAG_START, make_rng, mix_seed

_T, _Q, _S = 0, 1, 2


class AnswersExhausted(RuntimeError):
    pass


@dataclass
class ExplorationResult:
    component: VertexSet
    queries: int
    positives: int
    query_log: list = field(default_factory=list)
    truncated: bool = False

    @property
    def negatives(self):
        return self.queries - self.positives


def bernoulli_stream(p, seed, block=4096):
    """Infinite iterator of independent Bernoulli(p) bits (as bools)."""
    rng = make_rng(seed)
    while True:
        yield from (rng.random(block) < p).tolist()


def _answer_fn(answers):
    if isinstance(answers, EdgeMask):
        bits = answers.bits.tolist()
        return bits.__getitem__
    it = iter(answers)

    def ask(_eid):
        try:
            return bool(next(it))
        except StopIteration:
            raise AnswersExhausted("answer source ran out of bits") from None

    return ask


def _start_list(n, u_init):
    if isinstance(u_init, VertexSet):
        return u_init.indices().tolist()
    starts = list(dict.fromkeys(int(u) for u in u_init))
    for u in starts:
        if not 0 <= u < n:
            raise IndexError(f"vertex {u} out of range")
    return starts


def _check_partition(state, queue, finished, n):
    in_q = set(queue)
    in_s = set(finished)
    assert not in_q & in_s
    for v in range(n):
        expected = _S if v in in_s else _Q if v in in_q else _T
        assert state[v] == expected, f"vertex {v}: state {state[v]}, expected {expected}"


def explore(g, u_init, answers, size_cap=None, keep_log=True, check=False):
    """Explore the union of the clusters of ``u_init``.

    Parameters
    ----------
    g : RegularGraph
    u_init : VertexSet or iterable of int
        Initial queue contents, enqueued in the given order (ascending for
        a VertexSet).
    answers : EdgeMask or iterable of bool
        Mask mode answers each query with the queried edge's bit; stream
        mode takes the next bit for each query.
    size_cap : int, optional
        Stop early once ``|S| + |Q|`` exceeds this; the result is then
        flagged ``truncated`` and ``component`` holds ``S`` and ``Q``.
    check : bool
        Verify the S/Q/T partition after every round (slow).
    """
    starts = _start_list(g.n, u_init)
    if not starts:
        raise ValueError("u_init must be nonempty")
    ask = _answer_fn(answers)
    nbrs = g.neighbors
    nedges = g.neighbor_edges
    state = bytearray(g.n)
    queue = deque(starts)
    for u in starts:
        state[u] = _Q
    finished = []
    log = [] if keep_log else None
    queries = positives = 0
    reached = len(starts)
    cap = size_cap if size_cap is not None else g.n + 1
    truncated = reached > cap

    while queue and not truncated:
        v = queue[0]
        for w, eid in zip(nbrs[v], nedges[v]):
            if state[w] != _T:
                continue
            bit = ask(eid)
            queries += 1
            if keep_log:
                log.append((eid, int(bit)))
            if bit:
                positives += 1
                state[w] = _Q
                queue.append(w)
                reached += 1
                if reached > cap:
                    truncated = True
                    break
            if check:
                _check_partition(state, queue, finished, g.n)
        if truncated:
            break
        queue.popleft()
        state[v] = _S
        finished.append(v)
        if check:
            _check_partition(state, queue, finished, g.n)

    members = finished + list(queue) if truncated else finished
    return ExplorationResult(
        component=VertexSet.from_iterable(g.n, members),
        queries=queries, positives=positives, query_log=log or [], truncated=truncated,
    )


def _label_array(g, g1_components):
    labels = getattr(g1_components, "component_id", g1_components)
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size != g.n:
        raise ValueError("labeling has wrong length")
    return labels


def explore_with_component_hops(g, g1_components, w_set, k_start, answers, keep_log=True):
    """Exploration in which a positive answer absorbs a whole first-round component.

    ``T`` starts as every vertex outside ``k_start`` and ``w_set``. When the
    edge from the queue head to ``u`` in ``T`` is retained, all of ``u``'s
    component under ``g1_components`` that is still in ``T`` joins the queue
    in ascending vertex order.
    """
    labels = _label_array(g, g1_components)
    w_bits = as_bits(g.n, w_set)
    starts = _start_list(g.n, k_start)
    if not starts:
        raise ValueError("k_start must be nonempty")
    if np.any(w_bits[starts]):
        raise ValueError("k_start must be disjoint from w_set")
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    members = {int(labels[grp[0]]): grp.tolist() for grp in np.split(order, bounds) if grp.size}

    ask = _answer_fn(answers)
    nbrs = g.neighbors
    nedges = g.neighbor_edges
    state = bytearray(g.n)
    for v in np.flatnonzero(w_bits).tolist():
        state[v] = _S + 1  # excluded from T for the whole run
    queue = deque(starts)
    for u in starts:
        state[u] = _Q
    finished = []
    log = []
    queries = positives = 0
    while queue:
        v = queue[0]
        for w, eid in zip(nbrs[v], nedges[v]):
            if state[w] != _T:
                continue
            bit = ask(eid)
            queries += 1
            if keep_log:
                log.append((eid, int(bit)))
            if bit:
                positives += 1
                for x in members[int(labels[w])]:
                    if state[x] == _T:
                        state[x] = _Q
                        queue.append(x)
        queue.popleft()
        state[v] = _S
        finished.append(v)
    return ExplorationResult(
        component=VertexSet.from_iterable(g.n, finished),
        queries=queries, positives=positives, query_log=log,
    )


TAIL_CHUNK = 1000


def _tail_chunk(args):
    from .percolate import _WORKER_GRAPH as g

    p, cap, seed, chunk, count = args
    starts = make_rng(mix_seed(seed, chunk, TAG_START)).integers(0, g.n, size=count).tolist()
    bits = bernoulli_stream(p, mix_seed(seed, chunk, TAG_EXPLORE))
    hist = np.zeros(cap + 2, dtype=np.int64)
    for v in starts:
        res = explore(g, [v], bits, size_cap=cap, keep_log=False)
        if res.truncated:
            hist[cap + 1] += 1
        else:
            hist[len(res.component)] += 1
    return hist


@dataclass
class TailTable:
    """Cluster-size frequencies from independent explorations.

    ``counts[k]`` for ``1 <= k <= cap`` is the number of trials whose
    cluster had exactly k vertices; ``over_cap`` counts larger clusters.
    """

    counts: np.ndarray
    over_cap: int
    trials: int

    @property
    def cap(self):
        return self.counts.size - 1

    def frequency(self, k):
        if k > self.cap:
            raise ValueError(f"k={k} exceeds the exploration cap {self.cap}")
        return self.counts[k] / self.trials

    def frequencies(self, ks):
        return {int(k): self.frequency(k) for k in ks}

    def below(self, k):
        """Empirical P(|C(v)| < k)."""
        return self.counts[:k].sum() / self.trials


def cluster_size_tail(g, p, k_range, trials, seed, workers=1):
    """Empirical distribution of |C(v)| for uniformly random v.

    Every trial explores a fresh percolation (stream mode) from a random
    start vertex, stopping once the cluster exceeds ``max(k_range)``.
    Trials are grouped in chunks of 1000 with one start stream and one bit
    stream per chunk, so the result does not depend on ``workers``.
    """
    ks = list(k_range)
    if not ks or min(ks) < 1 or max(ks) > g.n:
        raise ValueError("k_range must lie within [1, n]")
    cap = max(ks)
    tasks = []
    for chunk, lo in enumerate(range(0, trials, TAIL_CHUNK)):
        tasks.append((p, cap, seed, chunk, min(TAIL_CHUNK, trials - lo)))
    hist = np.zeros(cap + 2, dtype=np.int64)
    for h in parallel_map(_tail_chunk, g, tasks, workers):
        hist += h
    return TailTable(counts=hist[:cap + 1], over_cap=int(hist[cap + 1]), trials=trials)
