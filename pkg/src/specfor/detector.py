"""Nearest-centroid attribution over spectral fingerprints."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CorruptDataError,
    EmptyEnrollmentError,
    LengthMismatchError,
    NoProfilesError,
)
from .spectrum import (
    FINGERPRINT_RADIAL_BINS,
    FINGERPRINT_SECTORS,
    FINGERPRINT_STAGES,
    Fingerprint,
)

PROFILE_VERSION = 1

_BLOCK = FINGERPRINT_RADIAL_BINS + FINGERPRINT_SECTORS


@dataclass
class SourceProfile:
    label: str
    centroid: np.ndarray
    count: int
    version: int = PROFILE_VERSION


@dataclass
class Classification:
    label: str
    scores: dict[str, float]
    margin: float
    stage_scores: dict[str, dict[str, float]] = field(default_factory=dict)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    # rounding can push |result| past 1 by an ulp; keep scores in [-1, 1]
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def _normalize_blocks(vec: np.ndarray) -> np.ndarray:
    out = np.array(vec, dtype=np.float64, copy=True)
    for start in range(0, len(out), _BLOCK):
        blockview = out[start:start + _BLOCK]
        norm = np.linalg.norm(blockview)
        if norm > 0:
            blockview /= norm
    return out


def enroll(label: str, fps: list[Fingerprint]) -> SourceProfile:
    """Centroid = per-stage-block L2-normalized mean of the fingerprints."""
    if not fps:
        raise EmptyEnrollmentError(f"no fingerprints to enroll for {label!r}")
    lengths = {len(fp.vector) for fp in fps}
    if len(lengths) != 1:
        raise LengthMismatchError(f"mixed fingerprint lengths {sorted(lengths)}")
    mean = np.mean([fp.vector for fp in fps], axis=0)
    return SourceProfile(label=label, centroid=_normalize_blocks(mean), count=len(fps))


def classify(fp: Fingerprint, profiles: list[SourceProfile]) -> Classification:
    """Nearest centroid under cosine similarity.

    Ties break to the lexicographically smallest label; margin is the top
    score minus the runner-up (minus 0.0 when only one profile exists).
    """
    if not profiles:
        raise NoProfilesError("no profiles to classify against")
    for prof in profiles:
        if len(prof.centroid) != len(fp.vector):
            raise LengthMismatchError(
                f"profile {prof.label!r} length {len(prof.centroid)} "
                f"!= fingerprint length {len(fp.vector)}"
            )
    scores = {p.label: cosine(fp.vector, p.centroid) for p in profiles}
    best = max(scores.values())
    label = min(lbl for lbl, sc in scores.items() if sc == best)
    runner_up = max((sc for lbl, sc in scores.items() if lbl != label), default=0.0)
    stage_scores = {}
    for p in profiles:
        per_stage = {}
        for i, stage in enumerate(FINGERPRINT_STAGES):
            sl = slice(i * _BLOCK, (i + 1) * _BLOCK)
            per_stage[str(int(stage))] = cosine(fp.vector[sl], p.centroid[sl])
        stage_scores[p.label] = per_stage
    return Classification(label=label, scores=scores,
                          margin=best - runner_up, stage_scores=stage_scores)


def anomaly_score(fp: Fingerprint, real_profile: SourceProfile) -> float:
    """1 - cosine similarity to the enrolled "real" centroid; in [0, 2]."""
    if len(real_profile.centroid) != len(fp.vector):
        raise LengthMismatchError(
            f"profile length {len(real_profile.centroid)} != fingerprint "
            f"length {len(fp.vector)}"
        )
    return 1.0 - cosine(fp.vector, real_profile.centroid)


def save_profile(profile: SourceProfile, directory) -> Path:
    """Write ``<directory>/<label>.json``; returns the path."""
    if os.sep in profile.label or profile.label in ("", ".", ".."):
        raise ValueError(f"label not usable as a file name: {profile.label!r}")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    doc = {
        "version": profile.version,
        "label": profile.label,
        "count": profile.count,
        "centroid": [float(v) for v in profile.centroid],
    }
    path = directory / f"{profile.label}.json"
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def load_profiles(directory) -> list[SourceProfile]:
    """Load every ``*.json`` profile in the directory, sorted by file name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise NoProfilesError(f"profile directory {directory} does not exist")
    profiles = []
    for path in sorted(directory.glob("*.json")):
        try:
            doc = json.loads(path.read_text())
            centroid = np.asarray(doc["centroid"], dtype=np.float64)
            profiles.append(SourceProfile(
                label=str(doc["label"]),
                centroid=centroid,
                count=int(doc["count"]),
                version=int(doc["version"]),
            ))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CorruptDataError(path, f"bad profile file: {exc}") from None
    if not profiles:
        raise NoProfilesError(f"no profile files in {directory}")
    return profiles
