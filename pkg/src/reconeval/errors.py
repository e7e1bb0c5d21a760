"""Exception hierarchy for the toolkit.

Errors are grouped into families; each family carries a distinct process
exit code so the CLI can map failures onto scriptable statuses.
"""

from __future__ import annotations

EXIT_CONFIG = 2
EXIT_FORMAT = 3
EXIT_VALIDATION = 4
EXIT_NUMERIC = 5


class ReconEvalError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class ConfigError(ReconEvalError):
    """Missing, unreadable, or inconsistent run configuration."""

    exit_code = EXIT_CONFIG


class FormatError(ReconEvalError):
    """Unreadable or unsupported file content."""

    exit_code = EXIT_FORMAT


class MalformedHeader(FormatError):
    """File header violates the declared format."""


class MalformedBody(FormatError):
    """File body contains tokens the header does not explain."""


class UnsupportedFormat(FormatError):
    """Recognized file, but a variant this reader does not handle."""


class TruncatedBody(FormatError):
    """File body ends before the header-declared element count."""


class NonFiniteCoordinate(FormatError):
    """A coordinate parsed as NaN or infinity."""


class FstkError(FormatError):
    """Invalid feature-stack container."""


class ValidationError(ReconEvalError):
    """An operation precondition was violated."""

    exit_code = EXIT_VALIDATION


class EmptyCloud(ValidationError):
    """Operation requires a nonempty point cloud."""


class EmptyResult(ValidationError):
    """A filtering step produced zero points; pipelines must not continue silently."""


class NonPositiveVoxel(ValidationError):
    """Voxel size must be strictly positive."""


class CloudTooSmall(ValidationError):
    """Cloud has too few points for the requested neighborhood size."""


class LengthMismatch(ValidationError):
    """Parallel sequences differ in length."""


class DimensionMismatch(ValidationError):
    """Images differ in size or channel count."""


class ImageSmallerThanWindow(ValidationError):
    """Image does not admit a single window position."""


class ShapeMismatch(ValidationError):
    """Feature stacks differ in layer shapes or weights."""


class ImageTooSmall(ValidationError):
    """Image cannot be downsampled the requested number of times."""


class EmptyCheckpoint(ValidationError):
    """A checkpoint carries no per-image metric values."""


class TooFewSamples(ValidationError):
    """Series is too short for interpolation."""


class UnpairedImage(ValidationError):
    """Rendered/reference image directories do not pair one-to-one."""


class NumericError(ReconEvalError):
    """A geometric or numerical procedure cannot proceed."""

    exit_code = EXIT_NUMERIC


class DegenerateConfiguration(NumericError):
    """Landmark points are rank-deficient (collinear or coincident)."""


class NoCorrespondences(NumericError):
    """No point pairs within the correspondence threshold at the first iteration."""


class DegenerateGeometry(NumericError):
    """Points are coplanar/collinear; the primitive fit is ill-posed."""


class Diverged(NumericError):
    """Iterative refinement left the feasible parameter region."""
