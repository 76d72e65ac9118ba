"""Bond percolation masks and component censuses."""

import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .rng import TAG_MASK, make_rng, mix_seed

CSV_COLUMNS = ("trial", "seed", "n", "p", "L1", "L2", "num_components", "gap_violations")


def fmt_float(x):
    """Render a float with 17 significant digits (round-trip exact)."""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class EdgeMask:
    """Retained-edge indicator for one percolation exposure.

    ``seed`` is None for masks not drawn directly from a stream
    (for example the union of two exposures).
    """

    bits: np.ndarray
    p: float
    seed: object = None

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def m(self):
        return self.bits.size

    @property
    def retained_count(self):
        return int(np.count_nonzero(self.bits))

    def __getitem__(self, j):
        return bool(self.bits[j])

    def __eq__(self, other):
        if not isinstance(other, EdgeMask):
            return NotImplemented
        return self.p == other.p and self.seed == other.seed and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.bits.tobytes(), self.p, self.seed))

    def to_text(self):
        seed = "-" if self.seed is None else str(self.seed)
        header = f"{self.m} {self.retained_count} {fmt_float(self.p)} {seed}"
        return header + "\n" + "".join("1" if b else "0" for b in self.bits.tolist()) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = text.split("\n")
        if len(lines) != 3 or lines[2] != "":
            raise ValueError("mask file must be a header line and one payload line")
        m, retained, p, seed = lines[0].split(" ")
        payload = lines[1]
        if len(payload) != int(m) or set(payload) - {"0", "1"}:
            raise ValueError("mask payload does not match header")
        bits = np.frombuffer(payload.encode("ascii"), dtype=np.uint8) == ord("1")
        if int(np.count_nonzero(bits)) != int(retained):
            raise ValueError("retained count does not match payload")
        return cls(bits, float(p), None if seed == "-" else int(seed))

    def write(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_text())

    @classmethod
    def read(cls, path):
        with open(path, newline="") as fh:
            return cls.from_text(fh.read())


def edge_uniforms(m, seed):
    """One uniform in [0, 1) per edge, in edge-index order."""
    return make_rng(seed).random(m)


def sample_mask(g, p, seed):
    """Keep each edge independently with probability p.

    Edge j is kept iff the j-th uniform of the seed's stream is below p, so
    masks drawn from one seed at increasing p are nested. ``g`` may also be
    a plain edge count.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    m = g if isinstance(g, (int, np.integer)) else g.m
    return EdgeMask(edge_uniforms(m, seed) < p, p, seed)


def coupled_masks(g, ps, seed):
    """Masks at several p values thresholded from the same uniforms."""
    u = edge_uniforms(g.m, seed)
    return [EdgeMask(u < p, p, seed) for p in ps]


def union_mask(mask1, mask2):
    if mask1.m != mask2.m:
        raise ValueError(f"mask lengths differ: {mask1.m} vs {mask2.m}")
    p = 1.0 - (1.0 - mask1.p) * (1.0 - mask2.p)
    return EdgeMask(mask1.bits | mask2.bits, p, None)


class UnionFind:
    """Disjoint sets over 0..n-1 with union by size and path compression."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, x):
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        self.count -= 1
        return True


@dataclass(frozen=True)
class ComponentStats:
    """Component census of a percolated graph.

    ``component_id[v]`` is the smallest vertex in v's component.
    """

    sizes: np.ndarray
    component_id: np.ndarray

    @property
    def n(self):
        return self.component_id.size

    @property
    def L1(self):
        return int(self.sizes[0]) if self.sizes.size else 0

    @property
    def L2(self):
        return int(self.sizes[1]) if self.sizes.size > 1 else 0

    @property
    def num_components(self):
        return int(self.sizes.size)

    def component_sizes(self):
        """Size of the component containing each vertex."""
        counts = np.bincount(self.component_id, minlength=self.n)
        return counts[self.component_id]

    def labels_by_size(self):
        """Map from component label to its size."""
        labels, counts = np.unique(self.component_id, return_counts=True)
        return dict(zip(labels.tolist(), counts.tolist()))

    def largest_label(self):
        """Label of a largest component (smallest label among ties)."""
        counts = np.bincount(self.component_id, minlength=self.n)
        return int(np.argmax(counts))

    def count_in_range(self, low, high):
        return int(np.count_nonzero((self.sizes >= low) & (self.sizes <= high)))

    def first_in_range(self, low, high):
        hits = self.sizes[(self.sizes >= low) & (self.sizes <= high)]
        return int(hits[0]) if hits.size else None


def stats_from_labels(component_id):
    component_id = np.asarray(component_id, dtype=np.int64)
    counts = np.bincount(component_id, minlength=component_id.size)
    sizes = np.sort(counts[counts > 0])[::-1].copy()
    return ComponentStats(sizes=sizes, component_id=component_id)


def components(g, mask):
    """Component census of the graph restricted to retained edges (union-find)."""
    bits = mask.bits if isinstance(mask, EdgeMask) else np.asarray(mask, dtype=bool)
    if bits.size != g.m:
        raise ValueError(f"mask has {bits.size} bits, graph has {g.m} edges")
    uf = UnionFind(g.n)
    union = uf.union
    for u, v in g.edges[bits].tolist():
        union(u, v)
    find = uf.find
    roots = np.fromiter((find(v) for v in range(g.n)), dtype=np.int64, count=g.n)
    # relabel each component by its smallest vertex
    smallest = np.full(g.n, g.n, dtype=np.int64)
    np.minimum.at(smallest, roots, np.arange(g.n))
    return stats_from_labels(smallest[roots])


@dataclass(frozen=True)
class TrialSummary:
    trial: int
    seed: int
    n: int
    p: float
    L1: int
    L2: int
    num_components: int
    gap_violations: int
    gap_witness: object = None

    def csv_row(self):
        return ",".join([
            str(self.trial), str(self.seed), str(self.n), fmt_float(self.p),
            str(self.L1), str(self.L2), str(self.num_components), str(self.gap_violations),
        ])


def trial_seed(base_seed, trial):
    return mix_seed(base_seed, trial, TAG_MASK)


def run_trial(g, p, trial, base_seed, gap_low, gap_high, keep_sizes=False):
    seed = trial_seed(base_seed, trial)
    stats = components(g, sample_mask(g, p, seed))
    summary = TrialSummary(
        trial=trial, seed=seed, n=g.n, p=p, L1=stats.L1, L2=stats.L2,
        num_components=stats.num_components,
        gap_violations=stats.count_in_range(gap_low, gap_high),
        gap_witness=stats.first_in_range(gap_low, gap_high),
    )
    return (summary, stats.sizes) if keep_sizes else summary


_WORKER_GRAPH = None


def _init_worker(g):
    global _WORKER_GRAPH
    _WORKER_GRAPH = g


def _census_task(args):
    return run_trial(_WORKER_GRAPH, *args)


def parallel_map(fn_task, g, tasks, workers):
    """Run ``fn_task(args)`` over tasks with the graph shared per process.

    Results come back in task order whatever the worker count.
    """
    workers = resolve_workers(workers)
    if workers <= 1 or len(tasks) <= 1:
        _init_worker(g)
        return [fn_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(g,)) as ex:
        return list(ex.map(fn_task, tasks))


def resolve_workers(workers):
    if workers is None or workers <= 0:
        return os.cpu_count() or 1
    return int(workers)


def trial_census(g, p, trials, base_seed, constants=None, gap_low=None, gap_high=None,
                 workers=1, keep_sizes=False):
    """Independent percolation trials on one graph.

    Trial ``t`` uses the mask seed ``mix_seed(base_seed, t, TAG_MASK)``.
    The gap interval ``[gap_low, gap_high]`` defaults to the one in
    ``constants``; each summary counts the components whose size falls in it.
    With ``keep_sizes`` each entry is ``(summary, sizes)``.
    """
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    if gap_low is None:
        gap_low = constants.gap_low if constants is not None else np.inf
    if gap_high is None:
        gap_high = constants.gap_high if constants is not None else np.inf
    tasks = [(p, t, base_seed, gap_low, gap_high, keep_sizes) for t in range(trials)]
    return parallel_map(_census_task, g, tasks, workers)


def census_csv(summaries):
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for s in summaries:
        buf.write(s.csv_row() + "\n")
    return buf.getvalue()
