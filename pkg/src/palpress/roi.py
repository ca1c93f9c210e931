"""Region-of-interest handling and scalar depth extraction.

The region of interest of a frame is the intersection of its quadrant box
mask and finger mask. Each frame is reduced to a single scalar depth over
that region (invalid zero readings excluded); the per-frame scalars of a
clip then define the clip's observed depth envelope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    BinaryMask,
    DegenerateClipError,
    DepthFrame,
    EmptyRoiError,
    MaskPair,
    require_same_shape,
)

__all__ = [
    "REDUCERS",
    "RoiDepth",
    "DepthStats",
    "intersect_masks",
    "extract_scalar_depth",
    "clip_depth_stats",
]

#: Supported per-frame reducers over valid ROI depth values.
REDUCERS = ("median", "mean", "min")


@dataclass(frozen=True)
class RoiDepth:
    """Scalar depth summary of one frame's ROI."""

    value: float
    valid_pixel_count: int

    def __post_init__(self) -> None:
        if self.valid_pixel_count < 1:
            raise EmptyRoiError("RoiDepth requires at least one valid pixel")
        if not np.isfinite(self.value) or self.value <= 0:
            raise ValueError(f"ROI depth must be finite and positive, got {self.value}")


@dataclass(frozen=True)
class DepthStats:
    """Observed scalar-depth envelope of a clip, in millimeters."""

    min_mm: float
    max_mm: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.min_mm) and np.isfinite(self.max_mm)):
            raise ValueError("depth stats must be finite")
        if not self.min_mm < self.max_mm:
            raise DegenerateClipError(
                f"depth range collapsed: min {self.min_mm} !< max {self.max_mm}"
            )

    @property
    def span(self) -> float:
        return self.max_mm - self.min_mm


def intersect_masks(pair: MaskPair) -> BinaryMask:
    """ROI = box AND finger. The result may be empty."""
    return BinaryMask(pair.box.pixels & pair.finger.pixels)


def extract_scalar_depth(
    depth: DepthFrame, roi: BinaryMask, reducer: str = "median"
) -> RoiDepth | None:
    """Reduce the valid ROI depth readings of one frame to a scalar.

    Depth value 0 marks an invalid sensor reading and never contributes.
    Returns ``None`` when the ROI contains no valid reading, so callers can
    skip the frame rather than fabricate a depth.
    """
    if reducer not in REDUCERS:
        raise ValueError(f"unknown reducer {reducer!r}; expected one of {REDUCERS}")
    require_same_shape(depth, roi, "depth/roi")
    values = depth.pixels[roi.pixels]
    values = values[values > 0]
    if values.size == 0:
        return None
    values = values.astype(np.float64)
    if reducer == "median":
        scalar = float(np.median(values))
    elif reducer == "mean":
        scalar = float(values.mean())
    else:
        scalar = float(values.min())
    return RoiDepth(value=scalar, valid_pixel_count=int(values.size))


def clip_depth_stats(scalars: list[RoiDepth]) -> DepthStats:
    """Aggregate per-frame scalars into the clip's observed envelope.

    Raises :class:`DegenerateClipError` when fewer than two frames carry a
    valid ROI or when every scalar is identical: a flat clip has no depth
    range to calibrate against.
    """
    if len(scalars) < 2:
        raise DegenerateClipError(
            f"need at least 2 frames with valid ROI depth, got {len(scalars)}"
        )
    values = np.array([s.value for s in scalars], dtype=np.float64)
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        raise DegenerateClipError(f"all {values.size} frame depths equal {lo}")
    return DepthStats(min_mm=lo, max_mm=hi)
