"""
Growing one cluster query by query
==================================

The queue exploration reveals edges one at a time. Here we watch a single
run, then compare cluster-size frequencies with the exponential tail bound.
"""

import math

from percolab import bernoulli_stream, cluster_size_tail, explore, random_regular

g = random_regular(20_000, 3, seed=3)
res = explore(g, [0], bernoulli_stream(0.75, seed=4), size_cap=40)
print(f"first 10 queries (edge, bit): {res.query_log[:10]}")
print(f"reached {len(res.component)} vertices after {res.queries} queries, truncated={res.truncated}")

table = cluster_size_tail(g, 0.75, range(1, 61), trials=20_000, seed=5)
print(f"P(|C| < 60) = {table.below(60):.4f}   (1 - y = {1 / 27:.4f})")
for k in (1, 2, 3, 5, 10, 20, 40, 60):
    print(f"k={k:3d}  freq={table.frequency(k):.5f}  bound exp(-k/24)={math.exp(-k / 24):.5f}")
