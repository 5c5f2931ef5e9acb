"""Fourier-domain machinery: DFT, centered log-magnitude spectra,
radial/angular profiles, anomalous-peak detection, and the per-image
spectral fingerprint.

Coordinate conventions
----------------------
Planes are indexed ``[y, x]``. The forward transform is the unnormalized
DFT ``F[u, v] = sum_{x, y} p[x, y] * exp(-2*pi*i*(u*x/W + v*y/H))``, so
``dft2`` output is indexed ``[v, u]`` with ``u`` horizontal. Centered
spectra put DC at ``(W//2, H//2)``; peak coordinates are centered
offsets ``(u, v) = (x_idx - W//2, y_idx - H//2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import NotSquareError, TooSmallError
from .filters import PipelineStage, apply_stage

#: Radial band count used by fingerprints (on-disk contract).
FINGERPRINT_RADIAL_BINS = 64
#: Angular sector count used by fingerprints (on-disk contract).
FINGERPRINT_SECTORS = 36
#: Stages whose spectra contribute to the fingerprint, in order.
FINGERPRINT_STAGES = (
    PipelineStage.LAPLACIAN,
    PipelineStage.LAPLACIAN_OF_MEDIAN,
    PipelineStage.MEDIAN_PLUS_LAPLACIAN,
)
#: Fingerprint vector length: one radial+angular block per stage.
FINGERPRINT_LENGTH = len(FINGERPRINT_STAGES) * (FINGERPRINT_RADIAL_BINS + FINGERPRINT_SECTORS)


def dft2(p: np.ndarray) -> np.ndarray:
    """Unnormalized forward 2D DFT of a plane.

    Parameters
    ----------
    p : (H, W) float array
        Input plane; both dimensions must be >= 2.

    Returns
    -------
    (H, W) complex128 array
        ``F[v, u]`` in standard (uncentered) DFT ordering. For real
        input the result is Hermitian-symmetric:
        ``F[v, u] == conj(F[-v % H, -u % W])``.
    """
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 2 or min(p.shape) < 2:
        raise TooSmallError(f"dft2 needs a 2D plane with sides >= 2, got {p.shape}")
    return np.fft.fft2(p)


def to_spectrum(f: np.ndarray) -> np.ndarray:
    """Centered log-magnitude spectrum: ``log(1 + |F|)`` quadrant-swapped
    so DC sits at ``(W//2, H//2)``. Values are >= 0; for real sources the
    result is point-symmetric about the center (even dimensions).
    """
    return np.fft.fftshift(np.log1p(np.abs(f)))


@dataclass
class RadialProfile:
    """Band means of a centered spectrum.

    ``bins[b]`` is the mean spectrum value over pixels whose rounded
    radius maps to band ``b``; ``dc_excluded`` records whether band 0
    was zeroed for feature use (band 0 is always *computed*).
    """

    bins: np.ndarray
    dc_excluded: bool = False


def radial_profile(s: np.ndarray, b: int) -> RadialProfile:
    """Average a square centered spectrum over integer radius bands.

    A pixel at distance ``r`` from the center belongs to band
    ``rint(rint(r) * (b - 1) / r_max)`` with ``r_max = W/2``; pixels
    mapping past ``b - 1`` (the corner region beyond ``r_max``) are
    ignored, and empty bands yield 0.

    Parameters
    ----------
    s : (W, W) float array
        Centered spectrum (must be square).
    b : int
        Band count, >= 2.
    """
    if s.shape[0] != s.shape[1]:
        raise NotSquareError(f"radial profile needs a square spectrum, got {s.shape}")
    if b < 2:
        raise ValueError(f"band count must be >= 2, got {b}")
    w = s.shape[0]
    cy = cx = w // 2
    yy, xx = np.mgrid[0:w, 0:w]
    r = np.hypot(yy - cy, xx - cx)
    idx = np.rint(np.rint(r) * (b - 1) / (w / 2.0)).astype(np.int64)
    valid = idx <= b - 1
    sums = np.bincount(idx[valid], weights=s[valid], minlength=b)[:b]
    counts = np.bincount(idx[valid], minlength=b)[:b]
    bins = np.zeros(b, dtype=np.float64)
    nonempty = counts > 0
    bins[nonempty] = sums[nonempty] / counts[nonempty]
    return RadialProfile(bins=bins, dc_excluded=False)


def angular_profile(s: np.ndarray, sectors: int) -> RadialProfile:
    """Average a square centered spectrum over angular sectors.

    Angles ``atan2(dy, dx)`` are folded into ``[0, pi)`` (magnitude
    symmetry makes opposite sectors redundant); sector ``k`` covers
    ``[k*pi/S, (k+1)*pi/S)``. The DC 3x3 core is excluded; every other
    pixel participates.
    """
    if s.shape[0] != s.shape[1]:
        raise NotSquareError(f"angular profile needs a square spectrum, got {s.shape}")
    if sectors < 4:
        raise ValueError(f"sector count must be >= 4, got {sectors}")
    w = s.shape[0]
    cy = cx = w // 2
    yy, xx = np.mgrid[0:w, 0:w]
    dy = yy - cy
    dx = xx - cx
    outside_core = (np.abs(dy) > 1) | (np.abs(dx) > 1)
    angles = np.mod(np.arctan2(dy, dx), np.pi)
    k = np.clip(np.floor(angles * sectors / np.pi).astype(np.int64), 0, sectors - 1)
    sums = np.bincount(k[outside_core], weights=s[outside_core], minlength=sectors)[:sectors]
    counts = np.bincount(k[outside_core], minlength=sectors)[:sectors]
    bins = np.zeros(sectors, dtype=np.float64)
    nonempty = counts > 0
    bins[nonempty] = sums[nonempty] / counts[nonempty]
    return RadialProfile(bins=bins, dc_excluded=False)


class SpectralPeak(NamedTuple):
    """One anomalous frequency: centered bin offsets and prominence ratio."""

    u: int
    v: int
    prominence: float


@dataclass
class PeakSet:
    """Detected peaks, prominence-descending; ``tau`` is the threshold used."""

    peaks: list[SpectralPeak] = field(default_factory=list)
    tau: float = 4.0


_ANNULUS_HALF = 7   # 15x15 window
_CORE_HALF = 1      # central 3x3 removed


def detect_peaks(s: np.ndarray, tau: float = 4.0) -> PeakSet:
    """Find bins that stand anomalously far above their local background.

    A bin is a peak iff (a) it is a strict local maximum over its
    8-neighborhood, (b) its value exceeds ``tau`` times the median of the
    surrounding 15x15 annulus (the window minus its central 3x3, clipped
    at spectrum borders), and (c) it lies outside the DC 3x3 core.
    Prominence is ``value / annulus_median`` (denominator floored at
    1e-12 so degenerate backgrounds stay finite); results are sorted by
    prominence descending, ties broken by ``(v, u)`` ascending.
    """
    if tau <= 1:
        raise ValueError(f"tau must be > 1, got {tau}")
    s = np.asarray(s, dtype=np.float64)
    h, w = s.shape
    cy, cx = h // 2, w // 2

    # strict local maxima over the 8-neighborhood, computed by comparing
    # against every shifted copy (borders padded with -inf so edge bins
    # only compete with in-bounds neighbors)
    padded = np.full((h + 2, w + 2), -np.inf)
    padded[1:-1, 1:-1] = s
    is_max = np.ones((h, w), dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            is_max &= s > padded[1 + dy:h + 1 + dy, 1 + dx:w + 1 + dx]

    # exclude the DC core
    is_max[max(cy - 1, 0):cy + 2, max(cx - 1, 0):cx + 2] = False

    peaks = []
    for y, x in np.argwhere(is_max):
        y0 = max(y - _ANNULUS_HALF, 0)
        y1 = min(y + _ANNULUS_HALF + 1, h)
        x0 = max(x - _ANNULUS_HALF, 0)
        x1 = min(x + _ANNULUS_HALF + 1, w)
        window = s[y0:y1, x0:x1]
        keep = np.ones(window.shape, dtype=bool)
        ky, kx = y - y0, x - x0
        keep[max(ky - _CORE_HALF, 0):ky + _CORE_HALF + 1,
             max(kx - _CORE_HALF, 0):kx + _CORE_HALF + 1] = False
        background = float(np.median(window[keep]))
        value = float(s[y, x])
        if value > tau * background:
            prominence = value / max(background, 1e-12)
            peaks.append(SpectralPeak(int(x - cx), int(y - cy), prominence))

    peaks.sort(key=lambda p: (-p.prominence, p.v, p.u))
    return PeakSet(peaks=peaks, tau=float(tau))


@dataclass
class Fingerprint:
    """Fixed-length spectral descriptor of one plane.

    ``vector`` concatenates, for each stage in ``stage_ids`` (order 3, 4,
    5), an L2-normalized radial profile (B=64, DC band zeroed) and an
    L2-normalized angular profile (S=36), with each 100-entry stage block
    re-normalized to unit L2 norm. Degenerate (flat) stages leave their
    block all-zero.
    """

    vector: np.ndarray
    stage_ids: tuple[int, ...] = tuple(int(s) for s in FINGERPRINT_STAGES)


def _unit(vec: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


def fingerprint(p_gray: np.ndarray, k: int = 3) -> Fingerprint:
    """Fingerprint a square, even-sided grayscale plane (side >= 32).

    For each stage in {3, 4, 5}: apply the stage, transform, and profile
    the centered log-magnitude spectrum; see :class:`Fingerprint` for the
    layout. The DC radial band is zeroed so global brightness never
    drives attribution.
    """
    h, w = p_gray.shape
    if h != w:
        raise NotSquareError(f"fingerprint needs a square plane, got {w}x{h}")
    if h < 32 or h % 2 != 0:
        raise TooSmallError(f"fingerprint needs an even side >= 32, got {h}")

    blocks = []
    for stage in FINGERPRINT_STAGES:
        residual = apply_stage(p_gray, stage, k)
        s = to_spectrum(dft2(residual))
        radial = radial_profile(s, FINGERPRINT_RADIAL_BINS)
        radial.bins[0] = 0.0
        radial.dc_excluded = True
        angular = angular_profile(s, FINGERPRINT_SECTORS)
        block = np.concatenate([_unit(radial.bins), _unit(angular.bins)])
        blocks.append(_unit(block))
    return Fingerprint(vector=np.concatenate(blocks))
