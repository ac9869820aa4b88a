import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from heatcap import (
    BinaryMask,
    Heatmap,
    connected_components,
    filter_regions,
    threshold,
)

from oracles import flood_fill_regions

masks = arrays(np.bool_, st.tuples(st.integers(1, 16), st.integers(1, 16)))
heatmaps = arrays(
    np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)), elements=st.floats(0, 1)
)


class TestThreshold:
    def test_all_zero(self):
        mask = threshold(Heatmap(np.zeros((3, 3))), 0.5)
        assert not mask.bits.any()

    def test_strict_comparison(self):
        mask = threshold(Heatmap(np.array([[0.4, 0.5, 0.6]])), 0.5)
        assert mask.bits.tolist() == [[False, False, True]]

    def test_tau_zero_picks_positive(self):
        mask = threshold(Heatmap(np.array([[0.0, 1e-9]])), 0.0)
        assert mask.bits.tolist() == [[False, True]]

    @given(heatmaps, st.floats(0, 1), st.floats(0, 1))
    def test_monotone_in_tau(self, values, tau1, tau2):
        lo, hi = min(tau1, tau2), max(tau1, tau2)
        hm = Heatmap(values)
        assert (threshold(hm, hi).bits <= threshold(hm, lo).bits).all()


class TestConnectedComponents:
    def test_empty_mask(self):
        assert connected_components(BinaryMask(np.zeros((4, 4), dtype=bool))) == []

    def test_two_blocks(self):
        bits = np.zeros((5, 5), dtype=bool)
        bits[0:2, 0:2] = True
        bits[3:5, 3:5] = True
        regions = connected_components(BinaryMask(bits), 8)
        assert len(regions) == 2
        assert [r.pixel_count for r in regions] == [4, 4]
        assert regions[0].bbox == (0, 0, 2, 2)  # tie broken to the top-left block
        assert regions[1].bbox == (3, 3, 2, 2)
        assert [r.id for r in regions] == [1, 2]

    def test_diagonal_connectivity(self):
        bits = np.zeros((2, 2), dtype=bool)
        bits[0, 0] = bits[1, 1] = True
        assert len(connected_components(BinaryMask(bits), 8)) == 1
        assert len(connected_components(BinaryMask(bits), 4)) == 2

    def test_pixels_property_uses_global_coords(self):
        bits = np.zeros((3, 4), dtype=bool)
        bits[1, 2] = bits[1, 3] = True
        (region,) = connected_components(BinaryMask(bits), 4)
        assert region.pixels == {(1, 2), (1, 3)}
        assert region.bbox == (2, 1, 2, 1)

    @pytest.mark.parametrize("connectivity", [4, 8])
    def test_matches_flood_fill_oracle(self, connectivity):
        rng = np.random.default_rng(42)
        for _ in range(100):
            h, w = rng.integers(1, 33, size=2)
            bits = rng.random((h, w)) < rng.uniform(0.2, 0.8)
            got = connected_components(BinaryMask(bits), connectivity)
            expect = flood_fill_regions(bits.tolist(), connectivity)
            assert len(got) == len(expect)
            for region, ref in zip(got, expect):
                assert region.pixel_count == ref["count"]
                assert region.bbox == ref["bbox"]
                assert region.pixels == ref["pixels"]

    @given(masks, st.sampled_from([4, 8]))
    def test_partition_properties(self, bits, connectivity):
        regions = connected_components(BinaryMask(bits), connectivity)
        assert sum(r.pixel_count for r in regions) == int(bits.sum())
        union = set()
        for r in regions:
            pix = r.pixels
            assert len(pix) == r.pixel_count
            assert not (union & pix)  # pairwise disjoint
            union |= pix
        assert union == {tuple(map(int, p)) for p in np.argwhere(bits)}

    @given(masks, st.sampled_from([4, 8]))
    def test_bbox_tight(self, bits, connectivity):
        for r in connected_components(BinaryMask(bits), connectivity):
            x, y, w, h = r.bbox
            rows = {p[0] for p in r.pixels}
            cols = {p[1] for p in r.pixels}
            assert min(rows) == y and max(rows) == y + h - 1
            assert min(cols) == x and max(cols) == x + w - 1


class TestFilterRegions:
    def _regions(self, *counts):
        bits = np.zeros((1, sum(counts) + len(counts)), dtype=bool)
        pos = 0
        for n in counts:
            bits[0, pos : pos + n] = True
            pos += n + 1
        return connected_components(BinaryMask(bits), 4)

    def test_zero_fraction_keeps_all(self):
        regions = self._regions(3, 2, 1)
        assert filter_regions(regions, 0.0, 100) == regions

    def test_small_region_removed(self):
        regions = self._regions(4)
        assert filter_regions(regions, 0.05, 100) == []

    def test_exact_fraction_kept(self):
        regions = self._regions(5)
        assert filter_regions(regions, 0.05, 100) == regions

    def test_order_and_ids_preserved(self):
        regions = self._regions(6, 3, 1)
        kept = filter_regions(regions, 0.02, 100)  # cutoff 2 px
        assert [r.id for r in kept] == [1, 2]
        assert [r.pixel_count for r in kept] == [6, 3]
