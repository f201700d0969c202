"""Fuzzy quantizer: frozen vectors, membership algebra, argmax oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuitbench.images import ImageU8, IndexImage
from fuitbench.transform import (
    FuzzyPartition,
    FuzzySet,
    build_uniform_partition,
    discretize_images,
    fuit_image,
    fuit_images,
    fuit_pixel,
    hard_discretize,
    triangular_membership,
    unique_value_count,
)

CLEAN_3X3 = np.array([[78, 61, 120], [236, 222, 40], [10, 11, 15]], dtype=np.uint8)
PERTURBED_3X3 = np.array([[81, 63, 123], [241, 222, 40], [17, 15, 17]], dtype=np.uint8)
EXPECTED_INDICES = [4, 3, 6, 12, 11, 2, 1, 1, 1]


def interp_membership(x, fset):
    """Independent piecewise evaluation via numpy's linear interpolation."""
    if fset.p == fset.q:
        return float(np.interp(x, [fset.q, fset.r], [1.0, 0.0]))
    if fset.q == fset.r:
        return float(np.interp(x, [fset.p, fset.q], [0.0, 1.0]))
    return float(np.interp(x, [fset.p, fset.q, fset.r], [0.0, 1.0, 0.0]))


class TestTriangularMembership:
    def test_peak_is_one(self):
        assert triangular_membership(12.5, FuzzySet(0, 12.5, 25)) == 1.0

    def test_outside_support_is_zero(self):
        s = FuzzySet(10, 20, 30)
        assert triangular_membership(10, s) == 0.0
        assert triangular_membership(5, s) == 0.0
        assert triangular_membership(30, s) == 0.0
        assert triangular_membership(35, s) == 0.0

    def test_ramp_midpoint(self):
        assert triangular_membership(5, FuzzySet(0, 10, 20)) == 0.5

    def test_hand_computed_value(self):
        # (10 - 0) / 12.5
        assert triangular_membership(10, FuzzySet(0, 12.5, 25)) == pytest.approx(0.80, abs=1e-12)

    def test_left_shoulder_flat(self):
        s = FuzzySet(10.0, 10.0, 30.0)
        assert triangular_membership(-5, s) == 1.0
        assert triangular_membership(10, s) == 1.0
        assert triangular_membership(20, s) == 0.5
        assert triangular_membership(30, s) == 0.0

    def test_right_shoulder_flat(self):
        s = FuzzySet(10.0, 30.0, 30.0)
        assert triangular_membership(10, s) == 0.0
        assert triangular_membership(20, s) == 0.5
        assert triangular_membership(30, s) == 1.0
        assert triangular_membership(99, s) == 1.0

    def test_degenerate_set_rejected(self):
        with pytest.raises(ValueError):
            FuzzySet(5, 5, 5)
        with pytest.raises(ValueError):
            FuzzySet(5, 4, 3)

    @given(
        x=st.floats(-50, 305),
        p=st.floats(0, 100),
        dq=st.floats(0.01, 100),
        dr=st.floats(0.01, 100),
    )
    def test_matches_interp_oracle(self, x, p, dq, dr):
        s = FuzzySet(p, p + dq, p + dq + dr)
        assert triangular_membership(x, s) == pytest.approx(interp_membership(x, s), abs=1e-12)

    @given(x=st.floats(-50, 305))
    def test_shoulders_match_interp_oracle(self, x):
        left = FuzzySet(10.625, 10.625, 31.875)
        right = FuzzySet(223.125, 244.375, 244.375)
        assert triangular_membership(x, left) == pytest.approx(interp_membership(x, left), abs=1e-12)
        assert triangular_membership(x, right) == pytest.approx(interp_membership(x, right), abs=1e-12)


class TestUniformPartition:
    def test_r12_peaks(self):
        part = build_uniform_partition(12)
        expected = [(k - 0.5) * 255.0 / 12 for k in range(1, 13)]
        assert np.allclose(part.peaks, expected)
        assert part.peaks[0] == pytest.approx(10.625)
        assert part.peaks[-1] == pytest.approx(244.375)

    def test_r2_peaks_and_crossover(self):
        part = build_uniform_partition(2)
        assert np.allclose(part.peaks, [63.75, 191.25])
        # exactly at the crossover both memberships are 0.5; lowest index wins
        rec = fuit_pixel(part, 127.5)
        assert rec.index == 1 and rec.mu == pytest.approx(0.5)
        assert fuit_pixel(part, 127.6).index == 2

    def test_feet_are_neighboring_peaks(self):
        part = build_uniform_partition(5)
        for k in range(1, 4):
            assert part.sets[k].p == part.peaks[k - 1]
            assert part.sets[k].r == part.peaks[k + 1]
        assert part.sets[0].p == part.sets[0].q
        assert part.sets[-1].q == part.sets[-1].r

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            build_uniform_partition(1)
        with pytest.raises(ValueError):
            build_uniform_partition(12, 100.0, 100.0)
        with pytest.raises(ValueError):
            build_uniform_partition(12, 255.0, 0.0)

    def test_coverage_validation_rejects_gaps(self):
        with pytest.raises(ValueError):
            FuzzyPartition(sets=(FuzzySet(0, 10, 20), FuzzySet(30, 40, 50)))
        # non-shouldered edges leave the domain endpoints uncovered
        with pytest.raises(ValueError):
            FuzzyPartition(sets=(FuzzySet(0, 100, 200), FuzzySet(100, 200, 255)))


class TestFuitPixel:
    def test_worked_example_pixels(self):
        part = build_uniform_partition(12)
        assert fuit_pixel(part, 78).index == 4
        assert fuit_pixel(part, 81).index == 4

    def test_peak_pixel_membership_one(self):
        part = build_uniform_partition(12)
        for k, q in enumerate(part.peaks, start=1):
            rec = fuit_pixel(part, float(q))
            assert rec.index == k
            assert rec.mu == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("r_sets", [2, 3, 12, 17, 64])
    def test_argmax_equals_bruteforce_and_nearest_peak(self, r_sets):
        part = build_uniform_partition(r_sets)
        peaks = part.peaks
        for x in range(256):
            mv = np.array([interp_membership(x, s) for s in part.sets])
            brute = int(np.argmax(mv)) + 1
            nearest = int(np.argmin(np.abs(x - peaks))) + 1
            rec = fuit_pixel(part, x)
            assert rec.index == brute == nearest
            assert rec.mu == pytest.approx(mv[rec.index - 1], abs=1e-12)
            assert rec.mu > 0

    @given(r_sets=st.integers(2, 64), x=st.integers(0, 254), dx=st.integers(0, 1))
    def test_index_monotone_in_pixel(self, r_sets, x, dx):
        part = build_uniform_partition(r_sets)
        assert fuit_pixel(part, x).index <= fuit_pixel(part, x + dx + 1).index

    @given(r_sets=st.integers(2, 64), x=st.floats(0, 255), delta=st.floats(-1, 1))
    @settings(max_examples=200)
    def test_perturbation_absorbed_inside_cell(self, r_sets, x, delta):
        part = build_uniform_partition(r_sets)
        peaks = part.peaks
        half = (peaks[1] - peaks[0]) / 2
        y = x + delta * (half - 1e-9)
        cell_x = int(np.argmin(np.abs(x - peaks)))
        cell_y = int(np.argmin(np.abs(y - peaks)))
        # both strictly inside the same nearest-peak cell
        if (
            cell_x == cell_y
            and abs(x - peaks[cell_x]) < half - 1e-9
            and abs(y - peaks[cell_y]) < half - 1e-9
            and 0 <= y <= 255
        ):
            assert fuit_pixel(part, x).index == fuit_pixel(part, y).index


class TestFuitImage:
    def test_worked_example_clean(self):
        part = build_uniform_partition(12)
        out = fuit_image(part, ImageU8(CLEAN_3X3))
        assert out.indices.ravel().tolist() == EXPECTED_INDICES
        assert out.r_used == 12

    def test_worked_example_adversarial_maps_identically(self):
        part = build_uniform_partition(12)
        out = fuit_image(part, ImageU8(PERTURBED_3X3))
        assert out.indices.ravel().tolist() == EXPECTED_INDICES

    def test_constant_image(self):
        part = build_uniform_partition(12)
        out = fuit_image(part, ImageU8(np.full((4, 5), 100, dtype=np.uint8)))
        assert len(np.unique(out.indices)) == 1
        assert out.rows == 4 and out.cols == 5

    def test_stack_transform_matches_single(self):
        part = build_uniform_partition(9)
        rng = np.random.default_rng(0)
        stack = rng.integers(0, 256, size=(7, 6, 5), dtype=np.uint8)
        batched = fuit_images(part, stack)
        for i in range(7):
            single = fuit_image(part, ImageU8(stack[i]))
            assert np.array_equal(batched[i], single.indices)


class TestHardDiscretize:
    def test_spot_values(self):
        img = ImageU8(np.array([[78, 255, 0]], dtype=np.uint8))
        out = hard_discretize(img, 32)
        assert out.indices.ravel().tolist() == [3, 8, 1]
        assert out.r_used == 8

    def test_l_one(self):
        img = ImageU8(np.array([[0, 255]], dtype=np.uint8))
        out = hard_discretize(img, 1)
        assert out.indices.ravel().tolist() == [1, 256]
        assert out.r_used == 256

    def test_invalid_width(self):
        img = ImageU8(CLEAN_3X3)
        with pytest.raises(ValueError):
            hard_discretize(img, 0)
        with pytest.raises(ValueError):
            discretize_images(CLEAN_3X3, 256)

    def test_idempotent_on_rescaled_output(self):
        # quantize, rescale each index back to its bin's representative pixel,
        # quantize again: a projection must reproduce the same indices
        img = ImageU8(np.arange(256, dtype=np.uint8).reshape(16, 16))
        first = hard_discretize(img, 32)
        rescaled = ImageU8(((first.indices - 1) * 32 + 16).clip(0, 255).astype(np.uint8))
        second = hard_discretize(rescaled, 32)
        assert np.array_equal(first.indices, second.indices)

    def test_fuit_idempotent_on_rescaled_output(self):
        part = build_uniform_partition(12)
        img = ImageU8(np.arange(256, dtype=np.uint8).reshape(16, 16))
        first = fuit_image(part, img)
        peaks = part.peaks
        rescaled = ImageU8(np.round(peaks[first.indices - 1]).astype(np.uint8))
        second = fuit_image(part, rescaled)
        assert np.array_equal(first.indices, second.indices)


class TestUniqueValueCount:
    def test_worked_example_counts(self):
        part = build_uniform_partition(12)
        clean = fuit_image(part, ImageU8(CLEAN_3X3))
        adv = fuit_image(part, ImageU8(PERTURBED_3X3))
        vals_c, n_c = unique_value_count(clean)
        vals_a, n_a = unique_value_count(adv)
        assert n_c == n_a == 7
        assert vals_c == vals_a == [1, 2, 3, 4, 6, 11, 12]

    def test_constant_image(self):
        _, n = unique_value_count(ImageU8(np.full((3, 3), 9, dtype=np.uint8)))
        assert n == 1

    def test_raw_image_count(self):
        vals, n = unique_value_count(ImageU8(np.array([[3, 1, 3], [1, 2, 2]], dtype=np.uint8)))
        assert (vals, n) == ([1, 2, 3], 3)


class TestIndexImage:
    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            IndexImage(np.array([[0, 1]]), r_used=12)
        with pytest.raises(ValueError):
            IndexImage(np.array([[1, 13]]), r_used=12)

    def test_unit_rescale(self):
        img = IndexImage(np.array([[1, 6, 12]]), r_used=12)
        assert np.allclose(img.to_unit(), [1 / 12, 0.5, 1.0])
