"""Core domain types: rasters, masks, enumerations, and seeded randomness.

Everything in this module is immutable after construction, so values can be
shared freely between threads and cached between pipeline stages.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PalpressError",
    "DimensionError",
    "EmptyRoiError",
    "DegenerateClipError",
    "PressureLevel",
    "CupSize",
    "Quadrant",
    "GrayImage",
    "DepthFrame",
    "BinaryMask",
    "MaskPair",
    "Frame",
    "Clip",
    "SPLITS",
    "Rng",
]


class PalpressError(Exception):
    """Base class for all pipeline errors."""


class DimensionError(PalpressError):
    """Raster data does not match its declared dimensions."""


class EmptyRoiError(PalpressError):
    """An operation that requires ROI pixels was given an empty region."""


class DegenerateClipError(PalpressError):
    """A clip's recorded depth range collapsed to a single value."""


class PressureLevel(enum.IntEnum):
    """Palpation pressure class, totally ordered from lightest to firmest."""

    LOW = 0
    MEDIUM = 1
    HIGH = 2

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "PressureLevel":
        try:
            return cls[str(label).upper()]
        except KeyError:
            raise ValueError(f"unknown pressure level {label!r}") from None


class CupSize(enum.Enum):
    """Breast cup size category; each has its own depth envelope."""

    A = "A"
    B = "B"
    C = "C"

    @classmethod
    def from_label(cls, label: str) -> "CupSize":
        try:
            return cls(str(label).upper())
        except ValueError:
            raise ValueError(f"unknown cup size {label!r}") from None


class Quadrant(enum.Enum):
    """Breast image quadrant covered by this pipeline (Q2/Q3, both sides)."""

    LEFT_Q2 = "left_q2"
    LEFT_Q3 = "left_q3"
    RIGHT_Q2 = "right_q2"
    RIGHT_Q3 = "right_q3"

    @classmethod
    def from_label(cls, label: str) -> "Quadrant":
        try:
            return cls(str(label).lower())
        except ValueError:
            raise ValueError(f"unknown quadrant {label!r}") from None


def _frozen_raster(data: np.ndarray, dtype: np.dtype, kind: str) -> np.ndarray:
    target = np.dtype(dtype)
    if isinstance(data, np.ndarray):
        # Arrays must already carry the right dtype; silent narrowing of a
        # 16-bit depth raster into 8 bits would wrap values, not clamp them.
        if data.dtype != target:
            raise TypeError(f"{kind} raster must have dtype {target}, got {data.dtype}")
        arr = data.copy()
    else:
        arr = np.asarray(data)
        if target.kind == "u" and arr.size:
            info = np.iinfo(target)
            if arr.dtype.kind not in "iu" or arr.min() < info.min or arr.max() > info.max:
                raise TypeError(f"{kind} raster values do not fit dtype {target}")
        arr = arr.astype(target)
    if arr.ndim != 2:
        raise DimensionError(f"{kind} raster must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{kind} raster dimensions must be positive, got {arr.shape}")
    arr.flags.writeable = False
    return arr


def _check_flat_length(kind: str, width: int, height: int, n: int) -> None:
    if width < 1 or height < 1:
        raise DimensionError(f"{kind} dimensions must be positive, got {width}x{height}")
    if n != width * height:
        raise DimensionError(
            f"{kind} data length {n} does not match {width}x{height} = {width * height}"
        )


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale raster, stored row-major as a (height, width) array."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "pixels", _frozen_raster(self.pixels, np.uint8, "gray"))

    @classmethod
    def from_flat(cls, width: int, height: int, data) -> "GrayImage":
        flat = np.asarray(data, dtype=np.uint8).ravel()
        _check_flat_length("gray", width, height, flat.size)
        return cls(flat.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class DepthFrame:
    """Per-pixel depth raster in millimeters; 0 marks an invalid reading."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "pixels", _frozen_raster(self.pixels, np.uint16, "depth"))

    @classmethod
    def from_flat(cls, width: int, height: int, data) -> "DepthFrame":
        flat = np.asarray(data, dtype=np.uint16).ravel()
        _check_flat_length("depth", width, height, flat.size)
        return cls(flat.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Boolean raster; may be empty, callers must handle empty ROI explicitly."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "pixels", _frozen_raster(self.pixels, bool, "mask"))

    @classmethod
    def from_flat(cls, width: int, height: int, data) -> "BinaryMask":
        flat = np.asarray(data).astype(bool).ravel()
        _check_flat_length("mask", width, height, flat.size)
        return cls(flat.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def count(self) -> int:
        return int(self.pixels.sum())


def require_same_shape(a, b, what: str) -> None:
    """Raise :class:`DimensionError` unless two rasters share dimensions."""
    if a.pixels.shape != b.pixels.shape:
        raise DimensionError(
            f"{what}: shapes {a.pixels.shape} and {b.pixels.shape} do not match"
        )


@dataclass(frozen=True, eq=False)
class MaskPair:
    """Quadrant box mask plus palpating-finger mask over the same frame."""

    box: BinaryMask
    finger: BinaryMask

    def __post_init__(self) -> None:
        require_same_shape(self.box, self.finger, "mask pair")


@dataclass(frozen=True, eq=False)
class Frame:
    """One aligned capture: gray intensity, depth, and its mask pair."""

    gray: GrayImage
    depth: DepthFrame
    masks: MaskPair

    def __post_init__(self) -> None:
        require_same_shape(self.gray, self.depth, "frame gray/depth")
        require_same_shape(self.gray, self.masks.box, "frame gray/mask")


SPLITS = ("train", "test")


@dataclass(frozen=True, eq=False)
class Clip:
    """A recorded palpation sequence with its provenance and split tag."""

    clip_id: str
    cup: CupSize
    quadrant: Quadrant
    split: str
    frames: tuple[Frame, ...]

    def __post_init__(self) -> None:
        if not self.clip_id:
            raise ValueError("clip id must be non-empty")
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}, got {self.split!r}")
        frames = tuple(self.frames)
        if not frames:
            raise ValueError(f"clip {self.clip_id!r} has no frames")
        first = frames[0].gray.pixels.shape
        for i, frame in enumerate(frames):
            if frame.gray.pixels.shape != first:
                raise DimensionError(
                    f"clip {self.clip_id!r} frame {i}: shape {frame.gray.pixels.shape} "
                    f"differs from {first}"
                )
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self) -> int:
        return len(self.frames)


class Rng:
    """Deterministic, splittable random stream.

    Equal seeds yield identical streams, and ``split`` derives child streams
    that are themselves reproducible from the parent seed. Draw values through
    the wrapped numpy :attr:`generator`.
    """

    def __init__(self, seed: int, _seq: np.random.SeedSequence | None = None):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        self.seed = seed
        self._seq = _seq if _seq is not None else np.random.SeedSequence(seed)
        self.generator = np.random.Generator(np.random.PCG64(self._seq))

    def split(self, n: int = 2) -> list["Rng"]:
        """Derive ``n`` independent child streams from this one."""
        if n < 1:
            raise ValueError("split count must be >= 1")
        return [Rng(self.seed, _seq=child) for child in self._seq.spawn(n)]

    def __repr__(self) -> str:  # pragma: no cover
        return f"Rng(seed={self.seed})"
