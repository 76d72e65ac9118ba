"""
The giant component of a random cubic graph
===========================================

Sweep lambda through the critical point on one random 3-regular graph and
compare the largest cluster with the tree prediction y.
"""

import numpy as np

from percolab import TheoryParams, components, coupled_masks, random_regular

n = 50_000
g = random_regular(n, 3, seed=1)

# One uniform per edge, thresholded at every p: the masks are nested, so the
# curve below is monotone by construction rather than by luck.
lams = np.linspace(0.6, 1.9, 14)
masks = coupled_masks(g, lams / 2, seed=7)

print(f"{'lambda':>7} {'L1/n':>8} {'y':>8} {'L2':>5}")
for lam, mask in zip(lams, masks):
    stats = components(g, mask)
    y = TheoryParams.from_lambda(3, lam).y
    print(f"{lam:7.2f} {stats.L1 / n:8.4f} {y:8.4f} {stats.L2:5d}")

# Below lambda = 1 no cluster holds a positive fraction of the graph. Near the
# critical point the runner-up L2 peaks; further up L1/n settles onto y.
