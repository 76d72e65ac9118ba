"""Acceptance criteria AC1-AC11.

Run with ``pytest tests/test_acceptance.py`` (or ``python3 tests/test_acceptance.py``);
the terminal summary prints one PASS/FAIL line per criterion.
"""

import json
import math
import shutil
import statistics
import sys
import time

import numpy as np
import pytest

from percolab.certify import exact_expansion, local_density, spectral_gap
from percolab.cli import main as cli_main
from percolab.explore import cluster_size_tail, explore
from percolab.generators import random_regular
from percolab.percolate import components, sample_mask, trial_census
from percolab.rng import TAG_MASK1, TAG_MASK2, make_rng, mix_seed
from percolab.sprinkle import sprinkle_trials
from percolab.theory import (gw_cluster_samples, solve_extinction, survival, survival_forms,
                             theorem_constants)

from conftest import DESK_N
from oracles import max_connected_excess, min_expansion

SQRT5 = math.sqrt(5.0)
Y_DESK = 26 / 27
ALPHA = 0.02
CENSUS_SEED = 1
SPRINKLE_SEED = 2


def acceptance(cid, title):
    return pytest.mark.acceptance(cid, title)


def per_call_seconds(fn, reps=200):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


@pytest.fixture(scope="session")
def desk_constants():
    return theorem_constants(DESK_N, 3, 1.5, delta=0.1)


@pytest.fixture(scope="session")
def desk_census(desk_graph):
    t0 = time.perf_counter()
    census = trial_census(desk_graph, 0.75, 20, CENSUS_SEED, keep_sizes=True, workers=0)
    return census, time.perf_counter() - t0


@pytest.fixture(scope="session")
def desk_sprinkle(desk_graph, desk_constants):
    t0 = time.perf_counter()
    runs = sprinkle_trials(desk_graph, desk_constants, Y_DESK, 20, SPRINKLE_SEED, workers=0)
    return runs, time.perf_counter() - t0


# ---- AC1 -----------------------------------------------------------------

@acceptance("AC1", "fixed points q, y match closed forms within 1e-12, < 1 ms per call")
@pytest.mark.parametrize("d,p,q_exact,y_exact", [
    (3, 0.75, 1 / 9, 26 / 27),
    (4, 0.5, SQRT5 - 2, (3 * SQRT5 - 5) / 2),
])
def test_ac1_fixed_points(d, p, q_exact, y_exact):
    assert abs(solve_extinction(d, p) - q_exact) <= 1e-12
    assert abs(survival(d, p) - y_exact) <= 1e-12
    assert per_call_seconds(lambda: solve_extinction(d, p)) < 1e-3
    assert per_call_seconds(lambda: survival(d, p)) < 1e-3


# ---- AC2 -----------------------------------------------------------------

@acceptance("AC2", "both survival forms agree within 1e-12 on 1000 random (d, lambda), < 1 s")
def test_ac2_dual_forms():
    rng = make_rng(20)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(3, 11))
        lam = 1.0 + (d - 2) * rng.uniform(1e-9, 1.0)
        lam = min(lam, np.nextafter(d - 1.0, 0.0))
        y1, y2 = survival_forms(d, lam / (d - 1))
        worst = max(worst, abs(y1 - y2))
    elapsed = time.perf_counter() - t0
    assert worst <= 1e-12, f"largest disagreement {worst:.3g}"
    assert elapsed < 1.0


# ---- AC3 -----------------------------------------------------------------

def _explore_partition(g, mask):
    seen = np.zeros(g.n, dtype=bool)
    parts = set()
    for v in range(g.n):
        if not seen[v]:
            comp = explore(g, [v], mask, keep_log=False).component.bits
            seen |= comp
            parts.add(frozenset(np.flatnonzero(comp).tolist()))
    return parts


def _uf_partition(stats):
    groups = {}
    for v, lab in enumerate(stats.component_id.tolist()):
        groups.setdefault(lab, []).append(v)
    return {frozenset(s) for s in groups.values()}


@acceptance("AC3", "union-find and queue exploration give identical partitions on 200 instances, < 5 s")
def test_ac3_oracle_equivalence():
    rng = make_rng(30)
    t0 = time.perf_counter()
    for i in range(200):
        d = int(rng.integers(3, 6))
        n = int(rng.integers(d + 1, 65))
        if (n * d) % 2:
            n -= 1
        n = max(n, 2 * d + 2)
        g = random_regular(n, d, seed=int(rng.integers(2**63)))
        mask = sample_mask(g, float(rng.uniform()), int(rng.integers(2**63)))
        assert _uf_partition(components(g, mask)) == _explore_partition(g, mask), f"instance {i}"
    assert time.perf_counter() - t0 < 5.0


# ---- AC4 -----------------------------------------------------------------

def _dense_lambda2(g):
    a = np.zeros((g.n, g.n))
    a[g.edges[:, 0], g.edges[:, 1]] = a[g.edges[:, 1], g.edges[:, 0]] = 1
    return np.linalg.eigvalsh(a)[-2]


@acceptance("AC4", "certifier matches brute force (n <= 14) and dense eigensolver (n <= 24), < 30 s")
def test_ac4_certifier(small_fixtures):
    t0 = time.perf_counter()
    k4, pet = small_fixtures["K4"], small_fixtures["petersen"]
    assert exact_expansion(k4) == 2.0
    assert local_density(k4, 4).max_excess[4] == 2
    assert exact_expansion(pet) == 1.0
    assert exact_expansion(small_fixtures["union_K4_K4"]) == 0.5
    assert abs(spectral_gap(k4) + 1) <= 1e-6
    assert abs(spectral_gap(pet) - 1) <= 1e-6
    for name, g in small_fixtures.items():
        if g.n <= 14:
            edges = g.edges.tolist()
            assert exact_expansion(g) == min_expansion(g.n, edges), name
            assert local_density(g, g.n).max_excess == max_connected_excess(g.n, edges, g.n), name
        assert g.n <= 24
        assert abs(spectral_gap(g) - _dense_lambda2(g)) <= 1e-6, name
    assert time.perf_counter() - t0 < 30.0


# ---- AC5 -----------------------------------------------------------------

@acceptance("AC5", "two-round split recombines to p (1e-12) and single-edge retention within 3 sigma, < 2 s")
def test_ac5_coupling(desk_constants):
    t0 = time.perf_counter()
    c = desk_constants
    assert abs(c.p1 - 14 / 19) <= 1e-12 and abs(c.p2 - 0.05) <= 1e-12
    assert abs(1 - (1 - c.p1) * (1 - c.p2) - c.p) <= 1e-12
    draws = 10**6
    # each draw is an independent single-edge graph exposed twice
    first = sample_mask(draws, c.p1, mix_seed(5, TAG_MASK1))
    second = sample_mask(draws, c.p2, mix_seed(5, TAG_MASK2))
    kept = int(np.count_nonzero(first.bits | second.bits))
    sigma = math.sqrt(draws * c.p * (1 - c.p))
    assert abs(kept - draws * c.p) <= 3 * sigma, f"kept {kept}, expected {draws * c.p:.0f} +- {3 * sigma:.0f}"
    assert time.perf_counter() - t0 < 2.0


# ---- AC6 / AC7 -----------------------------------------------------------

@acceptance("AC6", "desk scale: |1 - L1/(yn)| <= 0.02 and L2 <= small_cap in all 20 trials, < 60 s")
def test_ac6_giant(desk_census, desk_constants):
    census, elapsed = desk_census
    assert len(census) == 20
    bad = [(s.trial, s.L1 / (Y_DESK * s.n), s.L2) for s, _ in census
           if abs(1 - s.L1 / (Y_DESK * s.n)) > ALPHA or s.L2 > desk_constants.small_cap]
    assert not bad, f"trials outside the bound (trial, L1/yn, L2): {bad}"
    assert elapsed < 60.0


@acceptance("AC7", "desk scale: no component size in [gap_low, gap_high] in the same 20 trials")
def test_ac7_gap(desk_census, desk_constants):
    census, _ = desk_census
    lo, hi = desk_constants.gap_low, desk_constants.gap_high
    for summary, sizes in census:
        hits = sizes[(sizes >= lo) & (sizes <= hi)]
        assert hits.size == 0, f"trial {summary.trial}: component of size {int(hits[0])} in [{lo:.1f}, {hi:.1f}]"
        assert summary.gap_violations == 0


# ---- AC8 -----------------------------------------------------------------

@acceptance("AC8", "sprinkling: merge, uniqueness and W-monotonicity hold in all 20 trials, < 90 s")
def test_ac8_sprinkle(desk_sprinkle):
    runs, elapsed = desk_sprinkle
    assert len(runs) == 20
    for name in ("merge_ok", "unique_ok", "w_monotone"):
        bad = [r.trial for r in runs if not getattr(r, name)]
        assert not bad, f"{name} false in trials {bad}"
    assert elapsed < 90.0


# ---- AC9 -----------------------------------------------------------------

@acceptance("AC9", "tree-cluster survival frequency within 0.01 of y at 1e5 samples, < 30 s")
def test_ac9_gw():
    t0 = time.perf_counter()
    for d, lam in [(3, 1.5), (4, 1.5), (3, 2.0)]:
        p = lam / (d - 1)
        _, survived = gw_cluster_samples(d, p, 10**4, 10**5, seed=9)
        y = survival(d, p)
        assert abs(survived.mean() - y) <= 0.01, f"(d={d}, lambda={lam}): {survived.mean():.4f} vs {y:.4f}"
    assert time.perf_counter() - t0 < 30.0


# ---- AC10 ----------------------------------------------------------------

@acceptance("AC10", "empirical P(|C(v)| = k) <= exp(-k/24) for k in 60..120 over 1e5 starts")
def test_ac10_tail(desk_graph):
    ks = range(60, 121)
    table = cluster_size_tail(desk_graph, 0.75, ks, 10**5, seed=10, workers=0)
    violations = [(k, table.frequency(k), math.exp(-k / 24)) for k in ks
                  if table.frequency(k) > math.exp(-k / 24)]
    assert not violations, f"(k, frequency, bound): {violations[:5]}"


# ---- AC11 ----------------------------------------------------------------

@pytest.fixture(scope="module")
def ac11_inputs(tmp_path_factory):
    base = tmp_path_factory.mktemp("ac11")
    graph = base / "g.txt"
    assert cli_main(["gen", "--model", "random_regular", "--n", "20000", "--d", "3", "--seed", "3",
                     "--out", str(graph)]) == 0
    small = base / "small.txt"
    assert cli_main(["gen", "--model", "random_regular", "--n", "20", "--d", "3", "--seed", "4",
                     "--out", str(small)]) == 0
    mask = base / "mask.txt"
    from percolab.graph import RegularGraph
    sample_mask(RegularGraph.read(graph), 0.75, 6).write(mask)
    cfg = base / "exp.cfg"
    cfg.write_text(f"graph = {graph}\nlambda = 1.5\ntrials = 3\nsprinkle_trials = 2\nseed = 8\n"
                   "certify_local_k = 4\nout_dir = exp_out\n")
    return base, graph, small, mask, cfg


def _ac11_commands(graph, small, mask, cfg):
    return {
        "gen": (["gen", "--model", "adversarial_union", "--n", "1000", "--d", "3", "--seed", "5",
                 "--bridge-count", "2", "--out", "out.txt"], ["out.txt"]),
        "certify": (["certify", str(small), "--spectral", "--exact-expansion", "--local-k", "6",
                     "--cycle-spacing", "4", "--ball-growth", "--lambda", "1.5", "--cycle-free-radius", "1",
                     "--out", "rep.json"], ["rep.json"]),
        "theory": (["theory", "--d", "3", "--lambda", "1.5", "--n", "100000", "--out", "th.json"], ["th.json"]),
        "percolate": (["percolate", str(graph), "--p", "0.75", "--trials", "4", "--seed", "1",
                       "--lambda", "1.5", "--out", "perc.csv"], ["perc.csv"]),
        "explore_stream": (["explore", str(graph), "--start", "3,99", "--p", "0.75", "--seed", "2",
                            "--log", "q.log"], ["q.log"]),
        "explore_mask": (["explore", str(graph), "--start", "3", "--mask", str(mask), "--log", "qm.log"],
                         ["qm.log"]),
        "sprinkle": (["sprinkle", str(graph), "--lambda", "1.5", "--delta", "0.1", "--C", "3", "--c", "0.1",
                      "--alpha", "0.02", "--trials", "3", "--seed", "4", "--out", "spr.csv"], ["spr.csv"]),
        "experiment": (["experiment", str(cfg)], None),
    }


@acceptance("AC11", "every CLI command rerun gives byte-identical files for any worker count")
@pytest.mark.parametrize("name", ["gen", "certify", "theory", "percolate", "explore_stream", "explore_mask",
                                  "sprinkle", "experiment"])
def test_ac11_determinism(name, ac11_inputs, monkeypatch, capsys):
    base, graph, small, mask, cfg = ac11_inputs
    argv, files = _ac11_commands(graph, small, mask, cfg)[name]
    snapshots = []
    out = base / name
    monkeypatch.setenv("PERCOLAB_OUT_DIR", str(out))
    for workers in ["1", "2", "1"]:
        # identical flags and environment, fresh output directory contents
        shutil.rmtree(out, ignore_errors=True)
        out.mkdir()
        cli_main(["--workers", workers] + argv)
        stdout = capsys.readouterr().out
        names = files or sorted(p.name for p in out.iterdir())
        snapshots.append(({f: (out / f).read_bytes() for f in names}, stdout))
    assert snapshots[0][0], "no output files written"
    assert snapshots[0] == snapshots[1] == snapshots[2]
    if name == "theory":
        assert abs(json.loads(snapshots[0][0]["th.json"])["y"] - Y_DESK) < 1e-12


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
