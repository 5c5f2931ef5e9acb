"""Analysis orchestration and the JSON report contract.

The report serializes with sorted keys and no timestamps, so identical
input bytes and parameters produce byte-identical ``report.json``.
Timestamps go to a sidecar log only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from . import __version__
from .classic import clone_blocks, correlation_map, ela
from .detector import SourceProfile, anomaly_score, classify
from .errors import TooSmallError
from .filters import PipelineStage, apply_stage
from .image import (
    center_crop_even_square,
    load_image,
    normalize_unit,
    source_format,
    to_grayscale,
)
from .spectrum import (
    FINGERPRINT_RADIAL_BINS,
    FINGERPRINT_SECTORS,
    detect_peaks,
    dft2,
    fingerprint,
    to_spectrum,
)

_TOP_PEAKS = 10
_MIN_FINGERPRINT_SIDE = 32


@dataclass
class AnalysisParams:
    """Every knob the pipeline honors, with the pinned defaults."""

    k: int = 3
    tau: float = 4.0
    ela_quality: int = 90
    ela_gain: float = 20.0
    block: int = 16
    stride: int = 8
    sim_threshold: float = 0.95
    min_shift: int = 16
    corr_window: int = 7
    eight_connected: bool = False


@dataclass
class AnalysisResult:
    """Report dict plus the planes the CLI may render."""

    report: dict
    stage_planes: dict[int, np.ndarray] = field(default_factory=dict)
    stage_spectra: dict[int, np.ndarray] = field(default_factory=dict)


def _peak_entries(peakset) -> list[dict]:
    return [
        {"u": p.u, "v": p.v, "prominence": float(p.prominence)}
        for p in peakset.peaks[:_TOP_PEAKS]
    ]


def analyze_image(path, params: AnalysisParams,
                  profiles: list[SourceProfile] | None = None) -> AnalysisResult:
    """Run the full pipeline on one image file.

    Stages and spectra run on the center-cropped even square of the
    grayscale plane; ELA runs on the original encoded bytes; the
    correlation map and clone scan run on the full grayscale frame.
    """
    path = Path(path)
    rgb = load_image(path)
    fmt = source_format(path)
    gray_full = to_grayscale(rgb)
    gray = center_crop_even_square(gray_full)
    side = gray.shape[0]
    if side < _MIN_FINGERPRINT_SIDE:
        raise TooSmallError(
            f"{path}: cropped side {side} too small for spectral analysis "
            f"(needs >= {_MIN_FINGERPRINT_SIDE})"
        )

    stage_planes: dict[int, np.ndarray] = {}
    stage_spectra: dict[int, np.ndarray] = {}
    stages_report: dict[str, dict] = {}
    for stage in PipelineStage:
        residual = apply_stage(gray, stage, params.k,
                               eight_connected=params.eight_connected)
        s = to_spectrum(dft2(residual))
        peaks = detect_peaks(s, params.tau)
        stage_planes[int(stage)] = residual
        stage_spectra[int(stage)] = s
        stages_report[str(int(stage))] = {
            "energy": float(np.sum(residual * residual)),
            "peaks": _peak_entries(peaks),
        }

    fp = fingerprint(gray, params.k)

    ela_map = ela(path.read_bytes(), params.ela_quality, params.ela_gain)
    corr = correlation_map(gray_full, params.corr_window)
    clones = clone_blocks(gray_full, params.block, params.stride,
                          params.sim_threshold, params.min_shift)

    classification = None
    anomaly = None
    if profiles:
        cls = classify(fp, profiles)
        classification = {
            "label": cls.label,
            "scores": {lbl: float(s) for lbl, s in cls.scores.items()},
            "margin": float(cls.margin),
            "stage_scores": {
                lbl: {sid: float(v) for sid, v in per_stage.items()}
                for lbl, per_stage in cls.stage_scores.items()
            },
        }
        real = next((p for p in profiles if p.label == "real"), None)
        if real is not None:
            anomaly = float(anomaly_score(fp, real))

    report = {
        "artifact_version": __version__,
        "input": {
            "path": str(path),
            "width": int(rgb.shape[1]),
            "height": int(rgb.shape[0]),
            "cropped_side": int(side),
            "format": fmt,
        },
        "params": {
            "k": params.k,
            "tau": params.tau,
            "radial_bins": FINGERPRINT_RADIAL_BINS,
            "sectors": FINGERPRINT_SECTORS,
            "ela_quality": params.ela_quality,
            "ela_gain": params.ela_gain,
            "block": params.block,
            "stride": params.stride,
            "sim_threshold": params.sim_threshold,
            "min_shift": params.min_shift,
            "corr_window": params.corr_window,
            "laplacian_neighbors": 8 if params.eight_connected else 4,
        },
        "stages": stages_report,
        "classic": {
            "ela": {
                "quality": ela_map.quality,
                "gain": ela_map.gain,
                "mean": float(ela_map.plane.mean()),
                "max": float(ela_map.plane.max()),
            },
            "correlation": {
                "window": params.corr_window,
                "mean": float(corr.mean()),
                "min": float(corr.min()),
                "max": float(corr.max()),
            },
            "clones": [
                {
                    "src": [m.src[0], m.src[1]],
                    "dst": [m.dst[0], m.dst[1]],
                    "offset": [m.offset[0], m.offset[1]],
                    "similarity": float(m.similarity),
                }
                for m in clones
            ],
        },
        "classification": classification,
        "anomaly": anomaly,
    }
    return AnalysisResult(report=report, stage_planes=stage_planes,
                          stage_spectra=stage_spectra)


def report_bytes(report: dict) -> bytes:
    """Stable serialization: sorted keys, two-space indent, trailing newline."""
    return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode("utf-8")


def write_report(report: dict, out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "report.json"
    path.write_bytes(report_bytes(report))
    return path


def render_png(plane: np.ndarray, path) -> None:
    """normalize_unit then 8-bit grayscale PNG."""
    scaled = np.round(normalize_unit(plane) * 255.0).astype(np.uint8)
    Image.fromarray(scaled, mode="L").save(path, format="PNG")


def write_renders(result: AnalysisResult, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for sid, plane in sorted(result.stage_planes.items()):
        p = out_dir / f"stage{sid}.png"
        render_png(plane, p)
        written.append(p)
    for sid, s in sorted(result.stage_spectra.items()):
        p = out_dir / f"spectrum{sid}.png"
        render_png(s, p)
        written.append(p)
    return written
