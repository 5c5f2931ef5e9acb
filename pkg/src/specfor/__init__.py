"""specfor: spectral forensics for generated and tampered images.

Extracts frequency-domain fingerprints from convolutional filter
residuals, detects anomalous spectral peaks, attributes images to
enrolled sources by nearest centroid, and runs classical forgery checks
(error level analysis, correlation mapping, clone-block detection).
"""

__version__ = "0.1.0"

from .classic import CloneMatch, ElaMap, clone_blocks, correlation_map, ela
from .detector import (
    Classification,
    SourceProfile,
    anomaly_score,
    classify,
    cosine,
    enroll,
    load_profiles,
    save_profile,
)
from .errors import ForensicsError
from .filters import (
    LAPLACIAN_4,
    LAPLACIAN_8,
    PipelineStage,
    apply_stage,
    convolve,
    laplacian_filter,
    median_filter,
)
from .image import (
    center_crop_even_square,
    load_image,
    normalize_unit,
    to_grayscale,
)
from .spectrum import (
    FINGERPRINT_LENGTH,
    Fingerprint,
    PeakSet,
    RadialProfile,
    SpectralPeak,
    angular_profile,
    detect_peaks,
    dft2,
    fingerprint,
    radial_profile,
    to_spectrum,
)

__all__ = [
    "__version__",
    "CloneMatch", "ElaMap", "clone_blocks", "correlation_map", "ela",
    "Classification", "SourceProfile", "anomaly_score", "classify",
    "cosine", "enroll", "load_profiles", "save_profile",
    "ForensicsError",
    "LAPLACIAN_4", "LAPLACIAN_8", "PipelineStage", "apply_stage",
    "convolve", "laplacian_filter", "median_filter",
    "center_crop_even_square", "load_image", "normalize_unit", "to_grayscale",
    "FINGERPRINT_LENGTH", "Fingerprint", "PeakSet", "RadialProfile",
    "SpectralPeak", "angular_profile", "detect_peaks", "dft2",
    "fingerprint", "radial_profile", "to_spectrum",
]
