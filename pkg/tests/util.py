"""Shared test helpers: independent brute-force oracles and the frozen
synthetic fixture generators used by unit and acceptance tests.

Oracles here deliberately avoid the library implementations they check
(no scipy filters, no numpy FFT) so each comparison crosses two
independent code paths.
"""

from __future__ import annotations

import io
import math

import numpy as np
from PIL import Image


# ---------------------------------------------------------------------------
# oracles


def dft_direct(p: np.ndarray) -> np.ndarray:
    """Direct double-sum DFT: every output bin is computed as the literal
    sum over all pixels (no fast-transform structure)."""
    p = np.asarray(p, dtype=np.float64)
    h, w = p.shape
    y = np.arange(h)
    x = np.arange(w)
    u = np.arange(w)
    v = np.arange(h)
    # phase[v, u, y, x] = exp(-2*pi*i*(u*x/w + v*y/h))
    phase = np.exp(-2j * np.pi * (
        u[None, :, None, None] * x[None, None, None, :] / w
        + v[:, None, None, None] * y[None, None, :, None] / h
    ))
    return np.einsum("yx,vuyx->vu", p, phase)


def pad_replicate(p: np.ndarray, r: int) -> np.ndarray:
    return np.pad(p, r, mode="edge")


def median_oracle(p: np.ndarray, k: int) -> np.ndarray:
    """Sort-and-pick-middle median with replicate padding."""
    r = k // 2
    padded = pad_replicate(np.asarray(p, dtype=np.float64), r)
    h, w = p.shape
    out = np.empty((h, w), dtype=np.float64)
    for yy in range(h):
        for xx in range(w):
            window = np.sort(padded[yy:yy + k, xx:xx + k].ravel())
            out[yy, xx] = window[(k * k) // 2]
    return out


def conv_oracle(p: np.ndarray, kern: np.ndarray) -> np.ndarray:
    """Nested-loop spatial convolution (kernel flipped), replicate padding."""
    kern = np.asarray(kern, dtype=np.float64)
    kh = kern.shape[0]
    r = kh // 2
    padded = pad_replicate(np.asarray(p, dtype=np.float64), r)
    flipped = kern[::-1, ::-1]
    h, w = p.shape
    out = np.zeros((h, w), dtype=np.float64)
    for yy in range(h):
        for xx in range(w):
            out[yy, xx] = float(np.sum(padded[yy:yy + kh, xx:xx + kh] * flipped))
    return out


def radial_bin_oracle(s: np.ndarray, b: int) -> np.ndarray:
    """Per-pixel radial band classification using scalar math only."""
    w = s.shape[0]
    c = w // 2
    sums = [0.0] * b
    counts = [0] * b
    for yy in range(w):
        for xx in range(w):
            r = math.hypot(yy - c, xx - c)
            # round-half-to-even, matching numpy rint
            ri = _rint(r)
            band = _rint(ri * (b - 1) / (w / 2.0))
            if band <= b - 1:
                sums[band] += float(s[yy, xx])
                counts[band] += 1
    return np.array([sums[i] / counts[i] if counts[i] else 0.0 for i in range(b)])


def angular_bin_oracle(s: np.ndarray, sectors: int) -> np.ndarray:
    """Per-pixel sector classification using scalar math only."""
    w = s.shape[0]
    c = w // 2
    sums = [0.0] * sectors
    counts = [0] * sectors
    for yy in range(w):
        for xx in range(w):
            dy = yy - c
            dx = xx - c
            if abs(dy) <= 1 and abs(dx) <= 1:
                continue
            angle = math.atan2(dy, dx) % math.pi
            k = min(int(angle * sectors / math.pi), sectors - 1)
            sums[k] += float(s[yy, xx])
            counts[k] += 1
    return np.array([sums[i] / counts[i] if counts[i] else 0.0 for i in range(sectors)])


def _rint(x: float) -> int:
    """Round half to even (numpy rint semantics) as a plain int."""
    floor = math.floor(x)
    frac = x - floor
    if frac > 0.5:
        return floor + 1
    if frac < 0.5:
        return floor
    return floor if floor % 2 == 0 else floor + 1


# ---------------------------------------------------------------------------
# synthetic image classes (frozen fixture recipes)


def gen_smooth(rng: np.random.Generator, side: int = 128) -> np.ndarray:
    """Class (a): Gaussian-blurred noise, min-max scaled to [0, 255]."""
    from scipy import ndimage

    x = ndimage.gaussian_filter(rng.standard_normal((side, side)), 1.5)
    x = x - x.min()
    if x.max() > 0:
        x = x / x.max()
    return np.round(x * 255.0)


def gen_nn_upsampled(rng: np.random.Generator, side: int = 128) -> np.ndarray:
    """Class (b): nearest-neighbor 2x upsample of uniform noise."""
    base = rng.uniform(0.0, 255.0, (side // 2, side // 2))
    return np.round(np.repeat(np.repeat(base, 2, axis=0), 2, axis=1))


def gen_zero_insertion(rng: np.random.Generator, side: int = 128) -> np.ndarray:
    """Class (c): 2x zero-insertion of uniform noise, then 3x3 box smoothing
    (transposed-convolution-like)."""
    from scipy import ndimage

    base = rng.uniform(0.0, 255.0, (side // 2, side // 2))
    zi = np.zeros((side, side))
    zi[::2, ::2] = base
    box3 = np.full((3, 3), 1.0 / 9.0)
    return np.round(np.clip(ndimage.convolve(zi, box3, mode="nearest"), 0.0, 255.0))


# ---------------------------------------------------------------------------
# encoded-image fixtures


def png_bytes(arr: np.ndarray) -> bytes:
    """Encode a uint8 array (grayscale HxW or RGB HxWx3) as PNG bytes."""
    arr = np.asarray(arr, dtype=np.uint8)
    mode = "L" if arr.ndim == 2 else "RGB"
    buf = io.BytesIO()
    Image.fromarray(arr, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


def jpeg_roundtrip(arr: np.ndarray, quality: int) -> np.ndarray:
    """Encode as JPEG at the given quality and decode back to uint8 RGB."""
    buf = io.BytesIO()
    Image.fromarray(np.asarray(arr, dtype=np.uint8)).save(
        buf, format="JPEG", quality=quality)
    buf.seek(0)
    with Image.open(buf) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def rgb_texture(rng: np.random.Generator, side: int, sigma: float) -> np.ndarray:
    """Smoothed uniform RGB noise, contrast-stretched to full range."""
    from scipy import ndimage

    x = rng.uniform(0.0, 255.0, (side, side, 3))
    if sigma > 0:
        x = ndimage.gaussian_filter(x, (sigma, sigma, 0))
    x = x - x.min()
    if x.max() > 0:
        x = x / x.max() * 255.0
    return x.astype(np.uint8)


def make_splice_composite(seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Quality-95 background with a quality-60 64x64 block pasted off the
    8x8 JPEG grid; returns (uint8 RGB composite, boolean in-region mask)."""
    rng = np.random.default_rng(seed)
    background = jpeg_roundtrip(rgb_texture(rng, 192, 4.0), 95)
    patch_src = jpeg_roundtrip(rgb_texture(rng, 96, 1.0), 60)
    y0 = x0 = 68  # +4 off the blocking grid
    composite = background.copy()
    composite[y0:y0 + 64, x0:x0 + 64] = patch_src[16:80, 16:80]
    mask = np.zeros(composite.shape[:2], dtype=bool)
    mask[y0:y0 + 64, x0:x0 + 64] = True
    return composite, mask


def make_clone_composite(seed: int) -> tuple[np.ndarray, tuple[int, int]]:
    """Noise plane with a 32x32 patch copied 64 px to the right; returns
    (plane, true (dx, dy) offset). Patch corners sit on the stride-8 grid."""
    rng = np.random.default_rng(seed)
    plane = np.round(rng.uniform(0.0, 255.0, (160, 160)))
    plane[48:80, 96:128] = plane[48:80, 32:64]
    return plane, (64, 0)


def make_negative_plane(seed: int) -> np.ndarray:
    """Pure noise: no cloned regions."""
    rng = np.random.default_rng(seed)
    return np.round(rng.uniform(0.0, 255.0, (160, 160)))
