"""Image ingestion and the canonical grayscale plane.

Conventions used throughout the package:

* an RGB image is a ``uint8`` array of shape ``(height, width, 3)``;
* a plane is a ``float64`` array of shape ``(height, width)`` indexed
  ``[y, x]``; values are dimensionless intensities, usually in [0, 255].

Filtering operates on unquantized reals; rescaling to [0, 1] happens only
for rendering (``normalize_unit``).
"""

from __future__ import annotations

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    CorruptDataError,
    MissingFileError,
    TooSmallError,
    UnsupportedFormatError,
)

_ACCEPTED_FORMATS = {"PNG", "JPEG"}

# BT.601 luma weights.
_R_WEIGHT = 0.299
_G_WEIGHT = 0.587
_B_WEIGHT = 0.114


def load_image(path) -> np.ndarray:
    """Decode a PNG or JPEG file into a ``uint8 (H, W, 3)`` RGB array.

    Alpha channels are dropped after decoding; no color management is
    applied (raw stored values). Raises :class:`MissingFileError`,
    :class:`UnsupportedFormatError` or :class:`CorruptDataError`, each
    carrying the path and a reason.
    """
    try:
        img = Image.open(path)
    except FileNotFoundError:
        raise MissingFileError(path, "file does not exist") from None
    except IsADirectoryError:
        raise MissingFileError(path, "path is a directory") from None
    except UnidentifiedImageError:
        raise UnsupportedFormatError(path, "not a decodable image") from None
    except OSError as exc:
        raise CorruptDataError(path, f"unreadable: {exc}") from None

    with img:
        if img.format not in _ACCEPTED_FORMATS:
            raise UnsupportedFormatError(
                path, f"format {img.format or 'unknown'} not supported (PNG/JPEG only)"
            )
        try:
            rgb = img.convert("RGB")
            pixels = np.asarray(rgb, dtype=np.uint8)
        except OSError as exc:
            raise CorruptDataError(path, f"decode failed: {exc}") from None

    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise CorruptDataError(path, f"unexpected decoded shape {pixels.shape}")
    return pixels


def source_format(path) -> str:
    """Return ``"png"`` or ``"jpeg"`` by probing the file header."""
    try:
        with Image.open(path) as img:
            fmt = img.format
    except FileNotFoundError:
        raise MissingFileError(path, "file does not exist") from None
    except UnidentifiedImageError:
        raise UnsupportedFormatError(path, "not a decodable image") from None
    except OSError as exc:
        raise CorruptDataError(path, f"unreadable: {exc}") from None
    if fmt not in _ACCEPTED_FORMATS:
        raise UnsupportedFormatError(path, f"format {fmt or 'unknown'} not supported")
    return fmt.lower()


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """BT.601 luma: ``0.299*R + 0.587*G + 0.114*B``, kept as float64.

    Output has the input's spatial dimensions; values stay within
    [0, 255] because the weights are convex.
    """
    rgb = np.asarray(img, dtype=np.float64)
    return _R_WEIGHT * rgb[..., 0] + _G_WEIGHT * rgb[..., 1] + _B_WEIGHT * rgb[..., 2]


def center_crop_even_square(p: np.ndarray) -> np.ndarray:
    """Crop to the centered ``s``×``s`` region, ``s`` the largest even
    integer ≤ min(width, height).

    When a margin is odd the extra row/column is dropped from the
    bottom/right (the crop origin uses floor division). Idempotent.
    Raises :class:`TooSmallError` when the smaller dimension is < 2.
    """
    h, w = p.shape
    if min(h, w) < 2:
        raise TooSmallError(f"cannot crop {w}x{h}: need at least 2x2")
    s = min(h, w) & ~1  # largest even integer <= min
    top = (h - s) // 2
    left = (w - s) // 2
    return p[top:top + s, left:left + s]


def normalize_unit(p: np.ndarray) -> np.ndarray:
    """Affine min-max rescale into [0, 1]; constant planes map to zeros."""
    p = np.asarray(p, dtype=np.float64)
    lo = p.min()
    hi = p.max()
    if hi == lo:
        return np.zeros_like(p)
    return (p - lo) / (hi - lo)
