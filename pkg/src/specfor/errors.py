"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: input problems (unreadable or
degenerate images) exit 2, parameter problems exit 3, and a missing
profile store exits 4.
"""


class ForensicsError(Exception):
    """Base class for all toolkit errors."""


# --- input-side errors (CLI exit 2) ---

class ImageLoadError(ForensicsError):
    """A file could not be turned into pixels."""

    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = str(path)
        self.reason = reason


class MissingFileError(ImageLoadError):
    pass


class UnsupportedFormatError(ImageLoadError):
    pass


class CorruptDataError(ImageLoadError):
    pass


class TooSmallError(ForensicsError):
    """Input smaller than the operation can accept."""


class NotSquareError(ForensicsError):
    """Operation requires a square plane."""


class BadGeometryError(ForensicsError):
    """Plane geometry incompatible with the requested block layout."""


# --- parameter-side errors (CLI exit 3) ---

class BadWindowError(ForensicsError):
    """Window size violates the operation's preconditions."""


class BadKernelError(ForensicsError):
    """Kernel shape or size violates the operation's preconditions."""


# --- detector errors ---

class EmptyEnrollmentError(ForensicsError):
    """Enrollment requires at least one fingerprint."""


class LengthMismatchError(ForensicsError):
    """Fingerprint/centroid vectors have different lengths."""


class NoProfilesError(ForensicsError):
    """Classification requires at least one enrolled profile (CLI exit 4)."""
