"""Feature extraction: entropy, shadow area, Laws energy, LBP histograms."""

import numpy as np
import pytest

from palpress.core import BinaryMask, DimensionError, EmptyRoiError, GrayImage
from palpress.features import (
    LAWS_MAP_NAMES,
    LAWS_VECTORS,
    FeatureConfig,
    FeatureVector,
    RoiTooSmallError,
    Scheme,
    SchemeSet,
    entropy_feature,
    extract,
    laws_energy_maps,
    laws_histogram,
    laws_masks,
    lbp_histogram,
    shadow_feature,
)

from helpers import full_mask, random_gray


def _img(values):
    return GrayImage(np.asarray(values, dtype=np.uint8))


def _mask(values):
    return BinaryMask(np.asarray(values, dtype=bool))


class TestEntropy:
    def test_hand_computed_value(self):
        # 9 pixels: five 0s, three 128s, one 255 -> 1.35164 bits
        img = _img([[0, 0, 0], [0, 0, 128], [128, 128, 255]])
        assert entropy_feature(img, _mask(np.ones((3, 3)))) == pytest.approx(1.35164, abs=1e-4)

    def test_constant_is_zero(self):
        img = _img(np.full((8, 8), 77))
        assert entropy_feature(img, _mask(np.ones((8, 8)))) == 0.0

    def test_uniform_is_eight_bits(self):
        img = _img(np.arange(256).reshape(16, 16))
        assert entropy_feature(img, _mask(np.ones((16, 16)))) == pytest.approx(8.0)

    def test_range_on_random_images(self):
        gen = np.random.default_rng(3)
        for _ in range(20):
            value = entropy_feature(GrayImage(random_gray(gen)), _mask(full_mask()))
            assert 0.0 <= value <= 8.0

    def test_roi_restricts_pixels(self):
        img = _img([[0, 255], [0, 255]])
        left = _mask([[1, 0], [1, 0]])
        assert entropy_feature(img, left) == 0.0

    def test_empty_roi(self):
        with pytest.raises(EmptyRoiError):
            entropy_feature(_img(np.zeros((4, 4))), _mask(np.zeros((4, 4))))


class TestShadow:
    def test_fraction_below_threshold(self):
        img = _img([[10, 60], [49, 50]])
        assert shadow_feature(img, _mask(np.ones((2, 2))), threshold=50) == pytest.approx(0.5)

    def test_threshold_is_strict(self):
        img = _img(np.full((4, 4), 50))
        assert shadow_feature(img, _mask(np.ones((4, 4))), threshold=50) == 0.0
        assert shadow_feature(img, _mask(np.ones((4, 4))), threshold=51) == 1.0

    def test_monotone_in_threshold(self):
        gen = np.random.default_rng(5)
        img = GrayImage(random_gray(gen))
        roi = _mask(full_mask())
        values = [shadow_feature(img, roi, threshold=t) for t in (10, 50, 120, 250)]
        assert values == sorted(values)


class TestLawsEnergyMaps:
    def test_brute_force_interior(self):
        """Interior response must equal the literal sliding-window sum."""
        gen = np.random.default_rng(17)
        patch = gen.standard_normal((12, 12))
        maps = laws_energy_maps(patch)

        def corr(kernel):
            out = np.zeros((8, 8))
            for i in range(8):
                for j in range(8):
                    out[i, j] = (patch[i : i + 5, j : j + 5] * kernel).sum()
            return out

        e5e5 = np.abs(corr(np.outer(LAWS_VECTORS["E5"], LAWS_VECTORS["E5"])))
        assert np.allclose(maps["E5E5"][2:-2, 2:-2], e5e5, atol=1e-10)

        l5s5 = np.abs(corr(np.outer(LAWS_VECTORS["L5"], LAWS_VECTORS["S5"])))
        s5l5 = np.abs(corr(np.outer(LAWS_VECTORS["S5"], LAWS_VECTORS["L5"])))
        assert np.allclose(maps["L5S5"][2:-2, 2:-2], 0.5 * (l5s5 + s5l5), atol=1e-10)

    def test_cross_maps_are_transpose_invariant(self):
        gen = np.random.default_rng(29)
        patch = gen.standard_normal((16, 16))
        maps = laws_energy_maps(patch)
        maps_t = laws_energy_maps(patch.T)
        for name in ("L5E5", "E5S5", "S5R5"):
            assert np.allclose(maps[name][2:-2, 2:-2], maps_t[name].T[2:-2, 2:-2], atol=1e-10)

    def test_map_names_and_mask_table(self):
        assert len(LAWS_MAP_NAMES) == 9
        assert "L5L5" not in LAWS_MAP_NAMES
        masks = laws_masks()
        assert len(masks) == 25
        assert masks["L5E5"].shape == (5, 5)
        assert np.array_equal(masks["E5L5"], masks["L5E5"].T)


class TestLawsHistogram:
    def test_dimension_and_block_sums(self):
        gen = np.random.default_rng(7)
        img = GrayImage(random_gray(gen, size=32))
        hist = laws_histogram(img, _mask(full_mask(32)))
        assert hist.shape == (144,)
        for block in hist.reshape(9, 16):
            assert block.sum() == pytest.approx(1.0, abs=1e-9)

    def test_constant_image_collapses_to_first_bin(self):
        img = _img(np.full((20, 20), 131))
        hist = laws_histogram(img, _mask(np.ones((20, 20))))
        expected = np.zeros(16)
        expected[0] = 1.0
        for block in hist.reshape(9, 16):
            assert np.array_equal(block, expected)

    def test_offset_invariance(self):
        """A uniform brightness shift must not move a single histogram bin."""
        gen = np.random.default_rng(41)
        for _ in range(50):
            base = gen.integers(0, 200, size=(24, 24)).astype(np.uint8)
            shift = int(gen.integers(1, 56))
            roi = _mask(full_mask(24))
            a = laws_histogram(GrayImage(base), roi)
            b = laws_histogram(GrayImage(base + shift), roi)
            assert np.array_equal(a, b)

    def test_outside_roi_pixels_are_ignored(self):
        gen = np.random.default_rng(43)
        inner = gen.integers(0, 256, size=(26, 26)).astype(np.uint8)
        frame_a = np.zeros((32, 32), dtype=np.uint8)
        frame_b = np.full((32, 32), 255, dtype=np.uint8)
        frame_a[3:29, 3:29] = inner
        frame_b[3:29, 3:29] = inner
        roi = np.zeros((32, 32), dtype=bool)
        roi[3:29, 3:29] = True
        a = laws_histogram(GrayImage(frame_a), _mask(roi))
        b = laws_histogram(GrayImage(frame_b), _mask(roi))
        assert np.array_equal(a, b)

    def test_roi_smaller_than_window(self):
        img = _img(np.zeros((32, 32)))
        roi = np.zeros((32, 32), dtype=bool)
        roi[0:10, 0:10] = True
        with pytest.raises(RoiTooSmallError):
            laws_histogram(img, _mask(roi))

    def test_custom_bins(self):
        gen = np.random.default_rng(11)
        img = GrayImage(random_gray(gen, size=24))
        hist = laws_histogram(img, _mask(full_mask(24)), FeatureConfig(laws_bins=8))
        assert hist.shape == (72,)


class TestLbpHistogram:
    def test_constant_image_codes_255(self):
        img = _img(np.full((10, 10), 90))
        hist = lbp_histogram(img, _mask(np.ones((10, 10))))
        assert hist[255] == 1.0
        assert hist.sum() == pytest.approx(1.0)

    def test_isolated_bright_center_codes_zero(self):
        img = np.full((5, 5), 10, dtype=np.uint8)
        img[2, 2] = 200
        hist = lbp_histogram(GrayImage(img), _mask(np.ones((5, 5))))
        # nine interior-eroded centers... only the full 5x5 ROI erodes to the
        # middle 3x3; the exact center sees all neighbors below it -> code 0
        assert hist[0] > 0.0

    def test_histogram_properties(self):
        gen = np.random.default_rng(19)
        img = GrayImage(random_gray(gen))
        hist = lbp_histogram(img, _mask(full_mask()))
        assert hist.shape == (256,)
        assert hist.sum() == pytest.approx(1.0, abs=1e-9)
        assert (hist >= 0.0).all()

    def test_monotone_remap_invariance(self):
        """Codes compare neighbors, so any increasing tone curve is invisible."""
        gen = np.random.default_rng(31)
        for _ in range(50):
            img = gen.integers(0, 128, size=(20, 20)).astype(np.uint8)
            lut = np.sort(gen.choice(256, size=128, replace=False)).astype(np.uint8)
            a = lbp_histogram(GrayImage(img), _mask(full_mask(20)))
            b = lbp_histogram(GrayImage(lut[img]), _mask(full_mask(20)))
            assert np.array_equal(a, b)

    def test_outside_roi_pixels_are_ignored(self):
        gen = np.random.default_rng(37)
        inner = gen.integers(0, 256, size=(12, 12)).astype(np.uint8)
        frame_a = np.zeros((16, 16), dtype=np.uint8)
        frame_b = np.full((16, 16), 200, dtype=np.uint8)
        frame_a[2:14, 2:14] = inner
        frame_b[2:14, 2:14] = inner
        roi = np.zeros((16, 16), dtype=bool)
        roi[2:14, 2:14] = True
        a = lbp_histogram(GrayImage(frame_a), _mask(roi))
        b = lbp_histogram(GrayImage(frame_b), _mask(roi))
        assert np.array_equal(a, b)

    def test_roi_too_thin(self):
        img = _img(np.zeros((8, 8)))
        roi = np.zeros((8, 8), dtype=bool)
        roi[4, :] = True  # one-pixel stripe erodes to nothing
        with pytest.raises(RoiTooSmallError):
            lbp_histogram(img, _mask(roi))


class TestSchemeSet:
    def test_parse_variants(self):
        assert SchemeSet.parse("lawlbp") == SchemeSet.of(Scheme.LAW, Scheme.LBP)
        assert SchemeSet.parse("Law+LBP") == SchemeSet.of(Scheme.LAW, Scheme.LBP)
        assert SchemeSet.parse("ent") == SchemeSet.of(Scheme.ENTROPY)
        assert SchemeSet.parse("shadow_entropy") == SchemeSet.of(Scheme.ENTROPY, Scheme.SHADOW)

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            SchemeSet.parse("glcm")
        with pytest.raises(ValueError):
            SchemeSet.parse("")

    def test_canonical_order(self):
        assert SchemeSet.of(Scheme.LBP, Scheme.LAW).label == "LawLBP"
        assert SchemeSet.of(Scheme.SHADOW, Scheme.ENTROPY).label == "EntSha"

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            SchemeSet.of(Scheme.LAW, Scheme.LAW)

    def test_enumerations(self):
        assert len(SchemeSet.singles()) == 4
        assert len(SchemeSet.pairs()) == 6
        assert len(SchemeSet.all_sets()) == 10
        labels = [ss.label for ss in SchemeSet.all_sets()]
        assert len(set(labels)) == 10

    def test_dims(self):
        config = FeatureConfig()
        assert SchemeSet.of(Scheme.ENTROPY).dim(config) == 1
        assert SchemeSet.of(Scheme.LAW).dim(config) == 144
        assert SchemeSet.of(Scheme.LBP).dim(config) == 256
        assert SchemeSet.of(Scheme.LAW, Scheme.LBP).dim(config) == 400


class TestExtract:
    def test_concatenation_order_and_dim(self):
        gen = np.random.default_rng(13)
        img = GrayImage(random_gray(gen, size=32))
        roi = _mask(full_mask(32))
        pair = extract(img, roi, SchemeSet.of(Scheme.ENTROPY, Scheme.SHADOW))
        assert len(pair) == 2
        assert pair.values[0] == pytest.approx(entropy_feature(img, roi))
        assert pair.values[1] == pytest.approx(shadow_feature(img, roi, 50))

    def test_full_combination(self):
        gen = np.random.default_rng(13)
        img = GrayImage(random_gray(gen, size=32))
        roi = _mask(full_mask(32))
        vec = extract(img, roi, SchemeSet.of(Scheme.LAW, Scheme.LBP))
        assert len(vec) == 400
        assert np.array_equal(vec.values[:144], laws_histogram(img, roi))
        assert np.array_equal(vec.values[144:], lbp_histogram(img, roi))

    def test_mismatched_shapes(self):
        img = _img(np.zeros((8, 8)))
        roi = _mask(np.ones((9, 8)))
        with pytest.raises(DimensionError):
            extract(img, roi, SchemeSet.of(Scheme.ENTROPY))


class TestFeatureTypes:
    def test_feature_config_validation(self):
        with pytest.raises(ValueError):
            FeatureConfig(shadow_threshold=0)
        with pytest.raises(ValueError):
            FeatureConfig(laws_bins=1)
        with pytest.raises(ValueError):
            FeatureConfig(laws_mean_window=4)  # must be odd

    def test_feature_config_roundtrip(self):
        config = FeatureConfig(shadow_threshold=60, laws_bins=8, laws_mean_window=11)
        assert FeatureConfig.from_dict(config.to_dict()) == config

    def test_feature_vector_rejects_nan(self):
        with pytest.raises(ValueError):
            FeatureVector(values=np.array([1.0, np.nan]), scheme=SchemeSet.of(Scheme.ENTROPY))

    def test_feature_vector_frozen(self):
        vec = FeatureVector(values=np.array([1.0, 2.0]), scheme=SchemeSet.of(Scheme.ENTROPY))
        with pytest.raises(ValueError):
            vec.values[0] = 5.0
