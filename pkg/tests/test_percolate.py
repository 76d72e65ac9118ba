import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from percolab.generators import complete, petersen, random_regular
from percolab.percolate import (EdgeMask, UnionFind, census_csv, components, coupled_masks,
                                sample_mask, stats_from_labels, trial_census, union_mask)

from oracles import partition_by_mask


def _partition(stats):
    groups = {}
    for v, lab in enumerate(stats.component_id.tolist()):
        groups.setdefault(lab, set()).add(v)
    return {frozenset(s) for s in groups.values()}


class TestMasks:
    def test_extremes(self, petersen_graph):
        assert not sample_mask(petersen_graph, 0.0, seed=1).bits.any()
        assert sample_mask(petersen_graph, 1.0, seed=1).bits.all()

    def test_reproducible(self, petersen_graph):
        assert sample_mask(petersen_graph, 0.4, 7) == sample_mask(petersen_graph, 0.4, 7)

    def test_bad_p(self, k4):
        with pytest.raises(ValueError):
            sample_mask(k4, 1.5, 0)

    def test_coupled_masks_nested(self):
        g = random_regular(1000, 3, seed=0)
        masks = coupled_masks(g, [0.2, 0.5, 0.75], seed=3)
        for lo, hi in zip(masks, masks[1:]):
            assert np.all(~lo.bits | hi.bits)
        assert masks[1] == sample_mask(g, 0.5, 3)

    def test_coupled_l1_monotone(self):
        g = random_regular(2000, 3, seed=1)
        sizes = [components(g, m).L1 for m in coupled_masks(g, np.linspace(0.1, 1.0, 10), seed=9)]
        assert sizes == sorted(sizes)

    def test_union(self):
        a = EdgeMask([1, 0, 0, 1], 0.3, 1)
        b = EdgeMask([0, 0, 1, 1], 0.2, 2)
        u = union_mask(a, b)
        assert u.bits.tolist() == [True, False, True, True]
        assert u.p == pytest.approx(1 - 0.7 * 0.8)
        assert u.seed is None
        with pytest.raises(ValueError):
            union_mask(a, EdgeMask([1], 0.1))

    def test_text_round_trip(self, tmp_path):
        g = random_regular(100, 3, seed=0)
        m = sample_mask(g, 0.6, seed=123)
        path = tmp_path / "m.txt"
        m.write(path)
        assert EdgeMask.read(path) == m
        assert path.read_text().startswith(f"150 {m.retained_count} 0.59999999999999998 123\n")
        u = union_mask(m, m)
        assert EdgeMask.from_text(u.to_text()) == u

    @pytest.mark.parametrize("text", ["3 1 0.5 -\n10\n", "3 2 0.5 -\n101", "3 1 0.5 -\n1x0\n"])
    def test_bad_text(self, text):
        with pytest.raises(ValueError):
            EdgeMask.from_text(text)

    def test_int_edge_count(self):
        assert sample_mask(5, 1.0, seed=0).bits.tolist() == [True] * 5


class TestComponents:
    def test_full_mask_one_component(self, petersen_graph):
        s = components(petersen_graph, np.ones(15, bool))
        assert s.L1 == 10 and s.L2 == 0 and s.num_components == 1

    def test_empty_mask_singletons(self, petersen_graph):
        s = components(petersen_graph, np.zeros(15, bool))
        assert s.sizes.tolist() == [1] * 10
        assert s.component_id.tolist() == list(range(10))

    def test_wrong_length(self, k4):
        with pytest.raises(ValueError):
            components(k4, np.ones(5, bool))

    def test_labels_are_minimum_vertex(self, k4):
        # keep only edge (1, 3)
        s = components(k4, [False, False, False, False, True, False])
        assert s.component_id.tolist() == [0, 1, 2, 1]
        assert s.sizes.tolist() == [2, 1, 1]
        assert s.labels_by_size() == {0: 1, 1: 2, 2: 1}
        assert s.component_sizes().tolist() == [1, 2, 1, 2]
        assert s.largest_label() == 1

    def test_range_queries(self):
        s = stats_from_labels([0, 0, 0, 3, 3, 5])
        assert s.sizes.tolist() == [3, 2, 1]
        assert s.count_in_range(2, 3) == 2
        assert s.first_in_range(2, 2.5) == 2
        assert s.first_in_range(4, 9) is None

    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.sampled_from([10, 20, 32, 64]),
           p=st.floats(0.0, 1.0), mseed=st.integers(0, 2**32))
    def test_matches_naive_partition(self, seed, n, p, mseed):
        g = random_regular(n, 3, seed=seed)
        mask = sample_mask(g, p, mseed)
        s = components(g, mask)
        assert _partition(s) == partition_by_mask(n, g.edges.tolist(), mask.bits.tolist())
        assert s.sizes.sum() == n
        assert np.all(np.diff(s.sizes) <= 0)
        assert s.L1 >= s.L2

    def test_union_find_counts(self):
        uf = UnionFind(5)
        assert uf.union(0, 1) and uf.union(3, 4) and not uf.union(1, 0)
        assert uf.count == 3
        assert uf.find(0) == uf.find(1) != uf.find(3)


class TestCensus:
    def test_columns_and_rows(self):
        g = random_regular(2000, 3, seed=5)
        rows = trial_census(g, 0.75, 3, base_seed=1, gap_low=50, gap_high=100)
        text = census_csv(rows)
        lines = text.splitlines()
        assert lines[0] == "trial,seed,n,p,L1,L2,num_components,gap_violations"
        assert len(lines) == 4
        assert [r.trial for r in rows] == [0, 1, 2]
        assert len({r.seed for r in rows}) == 3

    def test_workers_do_not_change_results(self):
        g = random_regular(3000, 3, seed=6)
        one = trial_census(g, 0.75, 4, base_seed=2, workers=1)
        two = trial_census(g, 0.75, 4, base_seed=2, workers=2)
        assert census_csv(one) == census_csv(two)

    def test_keep_sizes(self):
        g = complete(3)
        (summary, sizes), = trial_census(g, 1.0, 1, base_seed=0, keep_sizes=True)
        assert summary.L1 == 4 and sizes.tolist() == [4]

    def test_subcritical_has_no_giant(self):
        g = random_regular(20_000, 3, seed=7)
        rows = trial_census(g, 0.3, 3, base_seed=0)
        assert all(r.L1 < 200 for r in rows)

    def test_negative_trials(self, k4):
        with pytest.raises(ValueError):
            trial_census(k4, 0.5, -1, 0)
