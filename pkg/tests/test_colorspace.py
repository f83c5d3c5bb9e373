import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmapsmith import colorspace as cs

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def ciede2000_pairs():
    with open(DATA / "ciede2000_pairs.json") as f:
        return json.load(f)["pairs"]


class TestDeltaE2000:
    def test_identity(self):
        c = cs.LabColor(50, 0, 0)
        assert cs.delta_e_2000(c, c) == 0.0

    def test_symmetry_random_pairs(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            x = cs.LabColor(*rng.uniform([0, -100, -100], [100, 100, 100]))
            y = cs.LabColor(*rng.uniform([0, -100, -100], [100, 100, 100]))
            assert cs.delta_e_2000(x, y) == pytest.approx(cs.delta_e_2000(y, x), abs=1e-12)

    def test_published_verification_pairs(self, ciede2000_pairs):
        for L1, a1, b1, L2, a2, b2, expected in ciede2000_pairs:
            got = cs.delta_e_2000(cs.LabColor(L1, a1, b1), cs.LabColor(L2, a2, b2))
            assert got == pytest.approx(expected, abs=1e-4)

    def test_vectorized_matches_scalar(self, ciede2000_pairs):
        arr = np.array(ciede2000_pairs)
        got = cs.delta_e_2000(arr[:, :3], arr[:, 3:6])
        assert np.allclose(got, arr[:, 6], atol=1e-4)

    def test_cross_check_against_skimage(self):
        skcolor = pytest.importorskip("skimage.color")
        rng = np.random.default_rng(11)
        x = rng.uniform([0, -110, -110], [100, 110, 110], (500, 3))
        y = rng.uniform([0, -110, -110], [100, 110, 110], (500, 3))
        ours = cs.delta_e_2000(x, y)
        theirs = skcolor.deltaE_ciede2000(x, y)
        assert np.allclose(ours, theirs, atol=1e-8)

    def test_zero_only_on_identical(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            x = rng.uniform([0, -100, -100], [100, 100, 100])
            y = x + rng.normal(0, 1, 3)
            if not np.allclose(x, y):
                assert cs.delta_e_2000(x, y) > 0


class TestSrgbConversion:
    def test_white_point(self):
        rgb = cs.lab_to_srgb(cs.WHITE)
        assert rgb is not None
        assert np.allclose(rgb.to_array(), [1, 1, 1], atol=1e-3)

    def test_black(self):
        rgb = cs.lab_to_srgb(cs.BLACK)
        assert rgb is not None
        assert np.allclose(rgb.to_array(), [0, 0, 0], atol=1e-3)

    def test_out_of_gamut_signals_none(self):
        assert cs.lab_to_srgb(cs.LabColor(50, 80, -80)) is None

    def test_out_of_gamut_clamp_still_converts(self):
        rgb = cs.lab_to_srgb(cs.LabColor(50, 80, -80), clamp=True)
        assert rgb is not None
        assert np.all(rgb.to_array() >= 0) and np.all(rgb.to_array() <= 1)

    def test_roundtrip_identity_in_gamut(self):
        rng = np.random.default_rng(5)
        rgb = rng.uniform(0, 1, (500, 3))
        lab = cs.srgb_to_lab_array(rgb)
        assert np.all(cs.in_gamut_array(lab, tol=1e-6))
        back = cs.srgb_to_lab_array(cs.lab_to_srgb_array(lab))
        assert np.allclose(back, lab, atol=1e-6)


class TestGamut:
    def test_neutral_axis_displayable(self):
        assert cs.in_gamut(cs.LabColor(50, 0, 0))

    def test_black_in_gamut(self):
        assert cs.in_gamut(cs.BLACK)

    def test_extreme_green_out(self):
        assert not cs.in_gamut(cs.LabColor(95, -120, 0))

    def test_clip_is_fixpoint_in_gamut(self):
        c = cs.LabColor(60, 20, -10)
        assert cs.gamut_clip(c) == c

    def test_clip_output_in_gamut_preserves_l_and_hue(self):
        rng = np.random.default_rng(13)
        n_checked = 0
        while n_checked < 1000:
            c = cs.LabColor(*rng.uniform([5, -128, -128], [95, 128, 128]))
            if cs.in_gamut(c):
                continue
            clipped = cs.gamut_clip(c)
            assert cs.in_gamut(clipped)
            assert clipped.L == pytest.approx(c.L, abs=1e-9)
            if clipped.chroma() > 1e-9:
                dh = abs(math.radians(clipped.hue_angle() - c.hue_angle()))
                dh = min(dh, 2 * math.pi - dh)
                assert dh < 1e-6
            n_checked += 1

    @given(
        st.floats(0, 100),
        st.floats(-128, 128),
        st.floats(-128, 128),
    )
    @settings(max_examples=200, deadline=None)
    def test_clip_idempotent(self, L, a, b):
        once = cs.gamut_clip(cs.LabColor(L, a, b))
        twice = cs.gamut_clip(once)
        assert np.allclose(once.to_array(), twice.to_array(), atol=1e-9)


class TestHex:
    def test_parse_case_insensitive(self):
        assert cs.parse_hex("#1a2B3c") == cs.parse_hex("#1A2B3C")

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            cs.parse_hex("zzz")
        with pytest.raises(ValueError):
            cs.parse_hex("#12345")

    def test_format_white(self):
        assert cs.format_hex(cs.RgbColor(1, 1, 1)) == "#FFFFFF"

    def test_roundtrip_hex(self):
        for s in ["#186E8D", "#000000", "#FFFFFF", "#4E79A7"]:
            assert cs.format_hex(cs.parse_hex(s)) == s

    def test_hue_angle_range(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            c = cs.LabColor(*rng.uniform([0, -100, -100], [100, 100, 100]))
            assert 0 <= c.hue_angle() < 360
