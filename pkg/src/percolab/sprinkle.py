"""Two-round exposure: percolate at p1, mark large components, sprinkle at p2.

The union of independent p1 and p2 exposures is a p-percolation with
``(1-p1)(1-p2) = 1-p``. A run records the first-round census, the set ``W``
of vertices in first-round components of size at least ``gap_low``, the
census of the union, and one verdict per structural claim.
"""

import io
from dataclasses import dataclass

import numpy as np

from .graph import VertexSet, as_bits, distance_to_set
from .percolate import (ComponentStats, EdgeMask, components, fmt_float, parallel_map,
                        sample_mask, union_mask)
from .rng import TAG_MASK1, TAG_MASK2, mix_seed

CSV_COLUMNS = ("trial", "L1_over_yn", "L2", "gap_ok", "spread_ok", "spread_radius_used",
               "merge_ok", "unique_ok", "theorem_ok")


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: object = None

    def __bool__(self):
        return self.ok


@dataclass
class SprinkleRun:
    constants: object
    mask1: EdgeMask
    mask2: EdgeMask
    mask_union: EdgeMask
    w_set: VertexSet
    stats1: ComponentStats
    stats_union: ComponentStats
    verdicts: dict


def large_vertex_set(stats, gap_low):
    """Vertices whose component has at least ``gap_low`` vertices."""
    return VertexSet(stats.component_sizes() >= gap_low)


def check_gap(stats, constants=None, gap_low=None, gap_high=None):
    """No component size may lie in the closed interval [gap_low, gap_high]."""
    low = constants.gap_low if gap_low is None else gap_low
    high = constants.gap_high if gap_high is None else gap_high
    hit = stats.first_in_range(low, high)
    return Verdict(hit is None, hit)


def check_spread(g, w_set, radius):
    """Every vertex is within ``radius`` of ``w_set`` in the full graph.

    The witness is ``(worst_vertex, its_distance)``, with distance -1 when
    the vertex cannot reach ``w_set`` at all.
    """
    bits = as_bits(g.n, w_set)
    if not bits.any():
        raise ValueError("w_set is empty")
    dist = distance_to_set(g, bits)
    if np.any(dist < 0):
        v = int(np.flatnonzero(dist < 0)[0])
        return Verdict(False, (v, -1))
    v = int(np.argmax(dist))
    return Verdict(int(dist[v]) <= radius, (v, int(dist[v])))


def check_merge(stats_union, w_set):
    """All of ``w_set`` lies in one component of the union census."""
    bits = as_bits(stats_union.n, w_set)
    labels = np.unique(stats_union.component_id[bits])
    if labels.size <= 1:
        return Verdict(True, None)
    return Verdict(False, labels[:2].tolist())


def check_uniqueness(stats_union, w_set, constants=None, gap_high=None):
    """Every union component with at least ``gap_high`` vertices meets ``w_set``."""
    high = constants.gap_high if gap_high is None else gap_high
    bits = as_bits(stats_union.n, w_set)
    labels = stats_union.component_id
    sizes = np.bincount(labels, minlength=labels.size)
    big = np.flatnonzero(sizes >= high)
    touched = np.zeros(labels.size, dtype=bool)
    touched[labels[bits]] = True
    bad = big[~touched[big]]
    if bad.size:
        return Verdict(False, (int(bad[0]), int(sizes[bad[0]])))
    return Verdict(True, None)


def theorem_verdict(run, y, alpha, small_cap=None):
    """``|1 - L1/(y n)| <= alpha`` and ``L2 <= small_cap`` on the union census.

    ``run`` is a SprinkleRun or a bare ComponentStats (then ``small_cap``
    is required). Witness is ``(L1/(y n), L2)``.
    """
    if isinstance(run, SprinkleRun):
        stats_union = run.stats_union
        if small_cap is None:
            small_cap = run.constants.small_cap
    else:
        stats_union = run
    ratio = stats_union.L1 / (y * stats_union.n) if y > 0 else float("inf")
    ok = abs(1.0 - ratio) <= alpha and stats_union.L2 <= small_cap
    return Verdict(ok, (ratio, stats_union.L2))


def w_monotone(w_set, stats_union, gap_low):
    """First-round large vertices remain in large components after sprinkling."""
    return bool(np.all(~as_bits(stats_union.n, w_set) | large_vertex_set(stats_union, gap_low).bits))


def run_sprinkle(g, constants, seed, y=None, spread_radius=None):
    """One two-round exposure with all verdicts.

    The two masks use seeds ``mix_seed(seed, TAG_MASK1)`` and
    ``mix_seed(seed, TAG_MASK2)``. ``y`` is required for the theorem verdict;
    ``spread_radius`` defaults to ``constants.spread_radius``.
    """
    from .theory import survival

    if y is None:
        y = survival(g.d, constants.p)
    radius = constants.spread_radius if spread_radius is None else spread_radius
    mask1 = sample_mask(g, constants.p1, mix_seed(seed, TAG_MASK1))
    mask2 = sample_mask(g, constants.p2, mix_seed(seed, TAG_MASK2))
    both = union_mask(mask1, mask2)
    stats1 = components(g, mask1)
    stats_union = stats1 if not mask2.bits.any() else components(g, both)
    w_set = large_vertex_set(stats1, constants.gap_low)

    verdicts = {
        "gap_first": check_gap(stats1, constants),
        "gap": check_gap(stats_union, constants),
        "spread": check_spread(g, w_set, radius) if len(w_set) else Verdict(False, None),
        "merge": check_merge(stats_union, w_set),
        "unique": check_uniqueness(stats_union, w_set, constants),
        "w_monotone": Verdict(w_monotone(w_set, stats_union, constants.gap_low)),
    }
    run = SprinkleRun(constants=constants, mask1=mask1, mask2=mask2, mask_union=both,
                      w_set=w_set, stats1=stats1, stats_union=stats_union, verdicts=verdicts)
    verdicts["theorem"] = theorem_verdict(run, y, constants.alpha)
    return run


@dataclass(frozen=True)
class SprinkleSummary:
    trial: int
    L1_over_yn: float
    L2: int
    gap_ok: bool
    spread_ok: bool
    spread_radius_used: int
    merge_ok: bool
    unique_ok: bool
    theorem_ok: bool
    w_monotone: bool
    L1_first: int
    L1_union: int

    def csv_row(self):
        b = lambda x: "1" if x else "0"  # noqa: E731
        return ",".join([
            str(self.trial), fmt_float(self.L1_over_yn), str(self.L2), b(self.gap_ok),
            b(self.spread_ok), str(self.spread_radius_used), b(self.merge_ok),
            b(self.unique_ok), b(self.theorem_ok),
        ])


def sprinkle_trial_seed(base_seed, trial):
    return mix_seed(base_seed, trial)


def summarize(trial, run, radius):
    v = run.verdicts
    return SprinkleSummary(
        trial=trial, L1_over_yn=v["theorem"].witness[0], L2=run.stats_union.L2,
        gap_ok=v["gap"].ok, spread_ok=v["spread"].ok, spread_radius_used=radius,
        merge_ok=v["merge"].ok, unique_ok=v["unique"].ok, theorem_ok=v["theorem"].ok,
        w_monotone=v["w_monotone"].ok, L1_first=run.stats1.L1, L1_union=run.stats_union.L1,
    )


def _sprinkle_task(args):
    from .percolate import _WORKER_GRAPH as g

    constants, y, trial, base_seed, radius = args
    run = run_sprinkle(g, constants, sprinkle_trial_seed(base_seed, trial), y=y, spread_radius=radius)
    return summarize(trial, run, radius)


def sprinkle_trials(g, constants, y, trials, base_seed, spread_radius=None, workers=1):
    radius = constants.spread_radius if spread_radius is None else spread_radius
    tasks = [(constants, y, t, base_seed, radius) for t in range(trials)]
    return parallel_map(_sprinkle_task, g, tasks, workers)


def sprinkle_csv(summaries):
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for s in summaries:
        buf.write(s.csv_row() + "\n")
    return buf.getvalue()
