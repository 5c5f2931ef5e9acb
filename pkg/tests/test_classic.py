import io

import numpy as np
import pytest
from PIL import Image
from scipy import ndimage

from specfor.classic import clone_blocks, correlation_map, ela
from specfor.errors import BadGeometryError, BadWindowError, CorruptDataError

from util import (
    jpeg_roundtrip,
    make_clone_composite,
    make_negative_plane,
    make_splice_composite,
    png_bytes,
    rgb_texture,
)


def _jpeg_bytes(arr, quality):
    buf = io.BytesIO()
    Image.fromarray(np.asarray(arr, dtype=np.uint8)).save(
        buf, format="JPEG", quality=quality)
    return buf.getvalue()


# --- ela ---------------------------------------------------------------------

def test_ela_solid_color_near_zero():
    solid = np.full((64, 64, 3), 128, dtype=np.uint8)
    for quality in (60, 90):
        out = ela(png_bytes(solid), quality=quality, gain=20.0)
        assert out.plane.shape == (64, 64)
        # flat blocks survive quantization: mean below 1.0 before gain
        assert out.plane.mean() / out.gain < 1.0


def test_ela_requantization_is_quieter_at_same_quality():
    # content already encoded at q responds less than content first saved
    # at quality 100, for the same analysis quality q
    q = 75
    for seed in range(10):
        rng = np.random.default_rng(40 + seed)
        tex = rgb_texture(rng, 96, 1.0)
        settled = _jpeg_bytes(tex, q)
        fresh = _jpeg_bytes(tex, 100)
        mean_settled = ela(settled, quality=q).plane.mean()
        mean_fresh = ela(fresh, quality=q).plane.mean()
        assert mean_settled < mean_fresh


def test_ela_splice_region_stands_out():
    composite, mask = make_splice_composite(1000)
    out = ela(png_bytes(composite), quality=90, gain=20.0)
    inside = out.plane[mask].mean()
    outside = out.plane[~mask].mean()
    assert inside >= 2.0 * outside


def test_ela_output_clamped():
    rng = np.random.default_rng(44)
    noisy = rng.integers(0, 256, (32, 32, 3), dtype=np.uint8)
    out = ela(png_bytes(noisy), quality=10, gain=50.0)
    assert out.plane.min() >= 0.0
    assert out.plane.max() <= 255.0


def test_ela_rejects_garbage_and_bad_params():
    with pytest.raises(CorruptDataError):
        ela(b"definitely not an image")
    good = png_bytes(np.zeros((8, 8, 3), dtype=np.uint8))
    with pytest.raises(ValueError):
        ela(good, quality=0)
    with pytest.raises(ValueError):
        ela(good, quality=101)
    with pytest.raises(ValueError):
        ela(good, gain=0.0)


# --- correlation_map ----------------------------------------------------------

def test_correlation_constant_plane_is_zero():
    assert np.array_equal(correlation_map(np.full((16, 16), 7.0), 5),
                          np.zeros((16, 16)))


def test_correlation_values_in_range_and_finite():
    rng = np.random.default_rng(45)
    p = rng.uniform(0, 255, (40, 40))
    out = correlation_map(p, 7)
    assert np.all(np.isfinite(out))
    assert out.min() >= -1.0
    assert out.max() <= 1.0


def test_correlation_smoothed_content_scores_higher():
    # heavily smoothed planes correlate with their own blur more than
    # raw white noise does
    for seed in range(10):
        rng = np.random.default_rng(50 + seed)
        noise = rng.uniform(0, 255, (48, 48))
        smooth = ndimage.uniform_filter(noise, size=5, mode="nearest")
        m_noise = correlation_map(noise, 7).mean()
        m_smooth = correlation_map(smooth, 7).mean()
        assert m_smooth > m_noise


def test_correlation_affine_invariance():
    rng = np.random.default_rng(46)
    p = rng.uniform(0, 255, (32, 32))
    base = correlation_map(p, 7)
    for a, b in ((2.0, 0.0), (0.5, 40.0), (3.0, -10.0)):
        assert np.allclose(correlation_map(a * p + b, 7), base, atol=1e-12)


def test_correlation_window_validation():
    p = np.zeros((16, 16))
    with pytest.raises(BadWindowError):
        correlation_map(p, 4)
    with pytest.raises(BadWindowError):
        correlation_map(p, 1)
    with pytest.raises(BadWindowError):
        correlation_map(p, 17)


# --- clone_blocks --------------------------------------------------------------

def test_clone_finds_exact_offset():
    plane, true_offset = make_clone_composite(0)
    matches = clone_blocks(plane, block=16, stride=8,
                           sim_threshold=0.95, min_shift=16)
    assert matches, "expected at least one clone match"
    assert any(m.offset == true_offset for m in matches)
    top = matches[0]
    assert top.similarity == pytest.approx(1.0)
    assert top.src != top.dst


def test_clone_matches_sorted_and_min_shift_respected():
    plane, _ = make_clone_composite(1)
    matches = clone_blocks(plane, block=16, stride=8,
                           sim_threshold=0.95, min_shift=16)
    sims = [m.similarity for m in matches]
    assert sims == sorted(sims, reverse=True)
    for m in matches:
        dx, dy = m.offset
        assert dx * dx + dy * dy >= 16 * 16
        # src precedes dst in scan order
        assert (m.src[1], m.src[0]) < (m.dst[1], m.dst[0])


def test_clone_negative_noise_planes():
    for seed in range(20):
        assert clone_blocks(make_negative_plane(seed)) == []


def test_clone_constant_plane_skipped():
    assert clone_blocks(np.full((64, 64), 9.0)) == []


def test_clone_geometry_validation():
    with pytest.raises(BadGeometryError):
        clone_blocks(np.zeros((64, 64)), block=4)
    with pytest.raises(BadGeometryError):
        clone_blocks(np.zeros((64, 64)), stride=0)
    with pytest.raises(BadGeometryError):
        clone_blocks(np.zeros((12, 12)), block=16)
