"""
Two-round exposure
==================

Percolate at p1, mark vertices in large first-round clusters (W), then add a
thin second round at p2. The union has the law of p-percolation, and the
second round is what glues W together.
"""

from percolab import random_regular, run_sprinkle, theorem_constants

n = 100_000
g = random_regular(n, 3, seed=42)
c = theorem_constants(n, 3, 1.5, delta=0.1)
print(f"p1={c.p1:.6f} p2={c.p2:.3f} -> 1-(1-p1)(1-p2) = {1 - (1 - c.p1) * (1 - c.p2):.15f}")
print(f"gap interval [{c.gap_low:.1f}, {c.gap_high:.1f}], spread radius {c.spread_radius}")

for seed in range(3):
    run = run_sprinkle(g, c, seed=seed)
    v = run.verdicts
    print(f"seed {seed}: |W|={len(run.w_set)}  first-round L1={run.stats1.L1}  union L1={run.stats_union.L1}  "
          + "  ".join(f"{k}={'ok' if ok else 'FAIL'}" for k, ok in v.items()))
    print(f"         farthest vertex from W: {v['spread'].witness}")
