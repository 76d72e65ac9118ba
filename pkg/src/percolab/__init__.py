"""Bond percolation on d-regular expanders: simulation, certification and theory."""

from .graph import INF, RegularGraph, VertexSet, ball, distance, edge_boundary, girth, girth_and_cycle_vertices, internal_edges
from .generators import GenSpec, adversarial_union, circulant, complete, generate, petersen, prism, random_regular
from .percolate import (ComponentStats, EdgeMask, UnionFind, components, coupled_masks, sample_mask,
                        trial_census, union_mask)
from .explore import bernoulli_stream, cluster_size_tail, explore, explore_with_component_hops
from .theory import (TheoremConstants, TheoryParams, chernoff_bound, gap_tail_prediction, gw_cluster_sample,
                     gw_cluster_samples, solve_extinction, survival, theorem_constants)
from .certify import (CertReport, ball_growth_check, certify_graph, cycle_free_vertices, cycle_spacing_check,
                      exact_expansion, local_density, spectral_gap)
from .sprinkle import (SprinkleRun, check_gap, check_merge, check_spread, check_uniqueness, run_sprinkle,
                       theorem_verdict)

__version__ = "0.1.0"
