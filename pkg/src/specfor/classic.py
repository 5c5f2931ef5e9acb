"""Classical forgery checks: error level analysis, a local
interpolation-consistency correlation map, and clone-block detection.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from .errors import BadGeometryError, BadWindowError, CorruptDataError

#: variances below this (after global mean removal) count as "no signal"
_VAR_FLOOR = 1e-12


@dataclass
class ElaMap:
    """Amplified JPEG recompression residuals, clamped to [0, 255]."""

    plane: np.ndarray
    quality: int
    gain: float


@dataclass
class CloneMatch:
    """A pair of similar blocks at a nontrivial offset.

    ``src`` and ``dst`` are block origins as ``(x, y)``; ``offset`` is
    ``(dx, dy) = dst - src``. ``src`` precedes ``dst`` in ``(y, x)``
    order, so each pair is reported once.
    """

    src: tuple[int, int]
    dst: tuple[int, int]
    offset: tuple[int, int]
    similarity: float


def ela(data: bytes, quality: int = 90, gain: float = 20.0) -> ElaMap:
    """Error level analysis of an encoded (JPEG or PNG) image.

    Decode, re-encode as JPEG at ``quality``, decode again; the map is
    the per-pixel absolute difference, maxed over channels, multiplied by
    ``gain`` and clamped to [0, 255]. Regions whose compression history
    differs from the rest of the image respond differently.
    """
    if not 1 <= quality <= 100:
        raise ValueError(f"quality must be in [1, 100], got {quality}")
    if gain <= 0:
        raise ValueError(f"gain must be > 0, got {gain}")
    try:
        with Image.open(io.BytesIO(data)) as img:
            rgb = np.asarray(img.convert("RGB"), dtype=np.float64)
    except (UnidentifiedImageError, OSError) as exc:
        raise CorruptDataError("<bytes>", f"cannot decode input: {exc}") from None

    buf = io.BytesIO()
    Image.fromarray(rgb.astype(np.uint8)).save(buf, format="JPEG", quality=quality)
    buf.seek(0)
    with Image.open(buf) as reimg:
        recoded = np.asarray(reimg.convert("RGB"), dtype=np.float64)

    diff = np.abs(rgb - recoded).max(axis=2)
    plane = np.clip(diff * gain, 0.0, 255.0)
    return ElaMap(plane=plane, quality=int(quality), gain=float(gain))


def correlation_map(p: np.ndarray, w: int = 7) -> np.ndarray:
    """Windowed Pearson correlation between a plane and its 3x3 box blur.

    At each pixel the ``w``x``w`` window of ``p`` is correlated against
    the same window of the box-smoothed plane (replicate padding for both
    the blur and the window means). Windows with (numerically) zero
    variance on either side map to 0; output values lie in [-1, 1].
    Interpolated/resampled content correlates with its own blur more
    strongly than camera noise does.
    """
    h, width = p.shape
    if w % 2 == 0 or w < 3:
        raise BadWindowError(f"window must be odd and >= 3, got {w}")
    if w > min(h, width):
        raise BadWindowError(f"window {w} exceeds plane {width}x{h}")

    a = np.asarray(p, dtype=np.float64)
    a = a - a.mean()  # better conditioning; Pearson is shift-invariant
    b = ndimage.uniform_filter(a, size=3, mode="nearest")

    def win_mean(x):
        return ndimage.uniform_filter(x, size=w, mode="nearest")

    ma = win_mean(a)
    mb = win_mean(b)
    cov = win_mean(a * b) - ma * mb
    var_a = win_mean(a * a) - ma * ma
    var_b = win_mean(b * b) - mb * mb

    out = np.zeros_like(a)
    ok = (var_a > _VAR_FLOOR) & (var_b > _VAR_FLOOR)
    out[ok] = cov[ok] / np.sqrt(var_a[ok] * var_b[ok])
    return np.clip(out, -1.0, 1.0)


def _descriptor(window: np.ndarray):
    """Mean-removed, L2-normalized block descriptor (None if flat)."""
    d = window.ravel().astype(np.float64)
    d = d - d.mean()
    norm = np.linalg.norm(d)
    if norm == 0:
        return None
    return d / norm


def _quantize_key(d: np.ndarray, block: int) -> bytes:
    # 2-bit quantization: thresholds at -1/block, 0, 1/block split unit
    # descriptors into four roughly balanced levels; identical content
    # always collides, which is all candidate generation needs.
    t = 1.0 / block
    q = np.digitize(d, (-t, 0.0, t)).astype(np.uint8)
    return q.tobytes()


def clone_blocks(p: np.ndarray, block: int = 16, stride: int = 8,
                 sim_threshold: float = 0.95, min_shift: int = 16) -> list[CloneMatch]:
    """Find pairs of near-identical blocks at a nontrivial offset.

    Blocks are slid at ``stride``; candidate pairs come from exact hash
    collisions of 2-bit-quantized descriptors and are confirmed by
    normalized correlation >= ``sim_threshold`` with Euclidean offset
    >= ``min_shift``. Flat (zero-variance) blocks never participate.
    Matches are sorted by similarity descending, ties broken by
    ``(src.y, src.x, dst.y, dst.x)``.
    """
    h, w = p.shape
    if block < 8:
        raise BadGeometryError(f"block must be >= 8, got {block}")
    if stride < 1:
        raise BadGeometryError(f"stride must be >= 1, got {stride}")
    if h < block or w < block:
        raise BadGeometryError(f"plane {w}x{h} smaller than block {block}")

    plane = np.asarray(p, dtype=np.float64)
    buckets: dict[bytes, list[tuple[int, int, np.ndarray]]] = {}
    for y in range(0, h - block + 1, stride):
        for x in range(0, w - block + 1, stride):
            d = _descriptor(plane[y:y + block, x:x + block])
            if d is None:
                continue
            buckets.setdefault(_quantize_key(d, block), []).append((y, x, d))

    matches = []
    for members in buckets.values():
        if len(members) < 2:
            continue
        for i in range(len(members)):
            yi, xi, di = members[i]
            for j in range(i + 1, len(members)):
                yj, xj, dj = members[j]
                dx, dy = xj - xi, yj - yi
                if dx * dx + dy * dy < min_shift * min_shift:
                    continue
                similarity = float(np.dot(di, dj))
                if similarity >= sim_threshold:
                    matches.append(CloneMatch(
                        src=(xi, yi), dst=(xj, yj),
                        offset=(dx, dy), similarity=similarity,
                    ))

    matches.sort(key=lambda m: (-m.similarity, m.src[1], m.src[0], m.dst[1], m.dst[0]))
    return matches
