"""Residual filter stages: median, Laplacian, their composition and sum.

All filters use replicate (clamp-to-edge) padding so flat fields stay
exactly flat at the borders.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np
from scipy import ndimage

from .errors import BadKernelError, BadWindowError, TooSmallError

#: 4-neighbor Laplacian stencil (default).
LAPLACIAN_4 = np.array([[0.0, 1.0, 0.0],
                        [1.0, -4.0, 1.0],
                        [0.0, 1.0, 0.0]])

#: 8-neighbor Laplacian stencil (optional variant, not the default).
LAPLACIAN_8 = np.array([[1.0, 1.0, 1.0],
                        [1.0, -8.0, 1.0],
                        [1.0, 1.0, 1.0]])


class PipelineStage(IntEnum):
    """The five analysis stages; ids are part of the report contract."""

    GRAY = 1
    MEDIAN = 2
    LAPLACIAN = 3
    LAPLACIAN_OF_MEDIAN = 4
    MEDIAN_PLUS_LAPLACIAN = 5


def median_filter(p: np.ndarray, k: int) -> np.ndarray:
    """Exact k×k neighborhood median under replicate padding; k=1 is identity."""
    h, w = p.shape
    if k < 1 or k % 2 == 0:
        raise BadWindowError(f"median window must be odd and >= 1, got {k}")
    if k > min(h, w):
        raise BadWindowError(f"median window {k} exceeds plane {w}x{h}")
    if k == 1:
        return np.array(p, dtype=np.float64, copy=True)
    return ndimage.median_filter(np.asarray(p, dtype=np.float64), size=k, mode="nearest")


def convolve(p: np.ndarray, kern: np.ndarray) -> np.ndarray:
    """Spatial convolution (kernel flipped) with replicate padding."""
    kern = np.asarray(kern, dtype=np.float64)
    if kern.ndim != 2 or kern.shape[0] != kern.shape[1]:
        raise BadKernelError(f"kernel must be square, got shape {kern.shape}")
    if kern.shape[0] % 2 == 0:
        raise BadKernelError(f"kernel size must be odd, got {kern.shape[0]}")
    if kern.shape[0] > min(p.shape):
        raise BadKernelError(
            f"kernel size {kern.shape[0]} exceeds plane {p.shape[1]}x{p.shape[0]}"
        )
    return ndimage.convolve(np.asarray(p, dtype=np.float64), kern, mode="nearest")


def laplacian_filter(p: np.ndarray, *, eight_connected: bool = False) -> np.ndarray:
    """Laplacian residual; the 4-neighbor stencil unless ``eight_connected``."""
    if min(p.shape) < 3:
        raise TooSmallError(f"laplacian needs at least 3x3, got {p.shape[1]}x{p.shape[0]}")
    return convolve(p, LAPLACIAN_8 if eight_connected else LAPLACIAN_4)


def apply_stage(p_gray: np.ndarray, stage: PipelineStage, k: int = 3,
                *, eight_connected: bool = False) -> np.ndarray:
    """Run one pipeline stage on the grayscale plane.

    Stage 5 is the pointwise sum of the stage-2 and stage-3 outputs (both
    computed from the grayscale plane), not a running accumulation.
    """
    stage = PipelineStage(stage)
    if stage is PipelineStage.GRAY:
        return np.array(p_gray, dtype=np.float64, copy=True)
    if stage is PipelineStage.MEDIAN:
        return median_filter(p_gray, k)
    if stage is PipelineStage.LAPLACIAN:
        return laplacian_filter(p_gray, eight_connected=eight_connected)
    if stage is PipelineStage.LAPLACIAN_OF_MEDIAN:
        return laplacian_filter(median_filter(p_gray, k), eight_connected=eight_connected)
    # MEDIAN_PLUS_LAPLACIAN
    return median_filter(p_gray, k) + laplacian_filter(p_gray, eight_connected=eight_connected)
