"""Shift engine tests: catalogue shape, kernel semantics, plan format."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from driftaudit.errors import InvalidParam, ParseError, UnknownShift
from driftaudit.shifts import (
    ShiftInstance,
    ShiftPlan,
    ShiftSpec,
    apply_shift,
    catalogue,
    expand_grid,
    get_kind,
    jpeg_encoded_size,
    parse_shift_plan,
    serialize_shift_plan,
)


def random_image(rng, h=24, w=32):
    return rng.random((3, h, w)).astype(np.float32)


def textured_image(seed=0, h=64, w=64):
    """Gradients plus noise; enough structure for codecs to bite on."""
    rng = np.random.default_rng(seed)
    ys = np.linspace(0, 1, h)[None, :, None]
    xs = np.linspace(0, 1, w)[None, None, :]
    base = np.concatenate([ys * np.ones((1, h, w)), xs * np.ones((1, h, w)),
                           0.5 * np.ones((1, h, w))])
    img = 0.6 * base + 0.4 * rng.random((3, h, w))
    return np.clip(img, 0, 1).astype(np.float32)


class TestCatalogue:
    def test_exactly_22_kinds(self):
        assert len(catalogue()) == 22

    def test_gaussian_noise_identity_param(self):
        assert get_kind("GaussianNoise").identity_param == 0

    def test_flips_parameterless(self):
        assert get_kind("HorizontalFlip").parameterless
        assert get_kind("VerticalFlip").parameterless

    def test_stable_order(self):
        assert [k.name for k in catalogue()] == [k.name for k in catalogue()]

    def test_stochastic_flags(self):
        stochastic = {k.name for k in catalogue() if k.stochastic}
        assert stochastic == {
            "GaussianNoise",
            "RandomErasing",
            "ColorJitter",
            "ElasticTransform",
            "PerspectiveTransform",
        }


class TestApplyShift:
    def test_zero_noise_is_identity(self):
        img = random_image(np.random.default_rng(0))
        out = apply_shift(img, ShiftInstance("GaussianNoise", 0, seed=1))
        np.testing.assert_array_equal(out, img)

    def test_horizontal_flip_involution(self):
        img = random_image(np.random.default_rng(1))
        inst = ShiftInstance("HorizontalFlip", None)
        np.testing.assert_array_equal(apply_shift(apply_shift(img, inst), inst), img)

    def test_vertical_flip_involution(self):
        img = random_image(np.random.default_rng(2))
        inst = ShiftInstance("VerticalFlip", None)
        np.testing.assert_array_equal(apply_shift(apply_shift(img, inst), inst), img)

    def test_brightness_on_constant_image(self):
        img = np.full((3, 8, 8), 0.4, dtype=np.float32)
        out = apply_shift(img, ShiftInstance("BrightnessShift", 1.5))
        np.testing.assert_allclose(out, 0.6, atol=1e-6)

    def test_posterize_one_bit(self):
        img = random_image(np.random.default_rng(3))
        out = apply_shift(img, ShiftInstance("Posterize", 1))
        assert set(np.unique(out)) <= {0.0, 1.0}

    def test_even_blur_kernel_rejected(self):
        with pytest.raises(InvalidParam):
            ShiftInstance("GaussianBlur", 4)

    def test_param_on_parameterless_kind_rejected(self):
        with pytest.raises(InvalidParam):
            ShiftInstance("HorizontalFlip", 0.5)

    def test_identity_params_reproduce_input(self):
        rng = np.random.default_rng(4)
        img = random_image(rng)
        for kind in catalogue():
            if kind.identity_param is None or kind.parameterless:
                continue
            inst = ShiftInstance(kind.name, kind.identity_param, seed=7)
            out = apply_shift(img, inst)
            np.testing.assert_allclose(out, img, atol=1e-6, err_msg=kind.name)

    def test_determinism_for_stochastic_kinds(self):
        rng = np.random.default_rng(5)
        img = random_image(rng)
        cases = [
            ("GaussianNoise", 0.2),
            ("RandomErasing", 0.1),
            ("ColorJitter", 0.3),
            ("ElasticTransform", 20.0),
            ("PerspectiveTransform", 0.2),
        ]
        for name, param in cases:
            inst = ShiftInstance(name, param, seed=99)
            first = apply_shift(img, inst)
            second = apply_shift(img, inst)
            np.testing.assert_array_equal(first, second, err_msg=name)
            different = apply_shift(img, ShiftInstance(name, param, seed=100))
            assert not np.array_equal(first, different), name

    def test_shape_and_range_preserved_all_kinds(self):
        rng = np.random.default_rng(6)
        params = {
            "GaussianNoise": 0.3, "BrightnessShift": 1.4, "Rotation": 25,
            "ContrastShift": 1.6, "SaturationShift": 1.5, "HueShift": 0.2,
            "GaussianBlur": 5, "JPEGCompression": 30, "Pixelation": 0.4,
            "PerspectiveTransform": 0.2, "ZoomIn": 0.7, "ZoomOut": 0.6,
            "RandomErasing": 0.2, "Grayscale": 0.8, "Sharpness": 2.5,
            "ColorJitter": 0.4, "ElasticTransform": 30.0, "Solarize": 0.4,
            "Posterize": 3, "MotionBlur": 7,
        }
        img = random_image(rng, h=17, w=23)  # odd sizes catch resize bugs
        for kind in catalogue():
            param = None if kind.parameterless else params[kind.name]
            out = apply_shift(img, ShiftInstance(kind.name, param, seed=11))
            assert out.shape == img.shape, kind.name
            assert out.min() >= 0.0 and out.max() <= 1.0, kind.name

    def test_jpeg_size_monotone_in_quality(self):
        img = textured_image()
        sizes = [jpeg_encoded_size(img, q) for q in (90, 50, 10)]
        assert sizes[0] >= sizes[1] >= sizes[2]

    def test_pixelation_color_count_monotone(self):
        img = textured_image(seed=1)
        counts = []
        for scale in (0.8, 0.4, 0.1):
            out = apply_shift(img, ShiftInstance("Pixelation", scale))
            flat = out.reshape(3, -1).T
            counts.append(len(np.unique(flat, axis=0)))
        assert counts[0] >= counts[1] >= counts[2]


class TestPlanFormat:
    def test_parse_example_block(self):
        plan = parse_shift_plan("GaussianNoise([0, 0.05, 0.1])\nHorizontalFlip")
        assert len(plan) == 2
        assert plan.specs[0].kind == "GaussianNoise"
        assert plan.specs[0].params == (0, 0.05, 0.1)
        assert plan.specs[1].kind == "HorizontalFlip"
        assert plan.specs[1].params == ()

    def test_parse_rotation_degrees(self):
        plan = parse_shift_plan("Rotation([90, 180, 270])")
        assert plan.specs[0].params == (90, 180, 270)

    def test_param_on_parameterless_rejected(self):
        with pytest.raises(InvalidParam):
            parse_shift_plan("HorizontalFlip([0.5])")

    def test_unknown_kind(self):
        with pytest.raises(UnknownShift):
            parse_shift_plan("StainMixup([0.5])")

    def test_malformed_params(self):
        with pytest.raises(ParseError):
            parse_shift_plan("GaussianNoise([0, zero])")

    def test_round_trip(self):
        text = "GaussianNoise([0, 0.05, 0.1])\nBrightnessShift([0.8, 1.2, 1.5])\nRotation([90, 180, 270])\nHorizontalFlip"
        plan = parse_shift_plan(text)
        assert serialize_shift_plan(plan) == text
        assert parse_shift_plan(serialize_shift_plan(plan)) == plan

    @settings(max_examples=50, deadline=None)
    @given(st.data())
    def test_round_trip_random_plans(self, data):
        kinds = [k for k in catalogue()]
        chosen = data.draw(st.lists(st.sampled_from(kinds), min_size=1, max_size=5))
        specs = []
        for kind in chosen:
            if kind.parameterless:
                specs.append(ShiftSpec(kind.name))
            elif kind.name in ("GaussianBlur", "MotionBlur"):
                ks = data.draw(st.integers(0, 5)) * 2 + 1
                specs.append(ShiftSpec(kind.name, (ks,)))
            elif kind.name == "JPEGCompression":
                specs.append(ShiftSpec(kind.name, (data.draw(st.integers(1, 100)),)))
            elif kind.name == "Posterize":
                specs.append(ShiftSpec(kind.name, (data.draw(st.integers(1, 8)),)))
            else:
                caps = {"PerspectiveTransform": 0.4, "ColorJitter": 0.5, "HueShift": 0.5}
                upper = caps.get(kind.name, 0.99)
                value = data.draw(
                    st.floats(0.01, upper, allow_nan=False, allow_infinity=False)
                )
                specs.append(ShiftSpec(kind.name, (value,)))
        plan = ShiftPlan(tuple(specs))
        assert parse_shift_plan(serialize_shift_plan(plan)) == plan


class TestExpandGrid:
    def test_grid_size(self):
        plan = parse_shift_plan("GaussianNoise([0, 0.05, 0.1])\nHorizontalFlip")
        instances = expand_grid(plan, base_seed=42)
        assert len(instances) == 4

    def test_empty_plan(self):
        assert expand_grid(ShiftPlan(), base_seed=42) == []

    def test_seed_assignment_deterministic(self):
        plan = parse_shift_plan("GaussianNoise([0, 0.05, 0.1])\nRotation([15, 30])")
        first = expand_grid(plan, base_seed=42)
        second = expand_grid(plan, base_seed=42)
        assert [i.seed for i in first] == [i.seed for i in second]
        other = expand_grid(plan, base_seed=43)
        assert [i.seed for i in first] != [i.seed for i in other]
