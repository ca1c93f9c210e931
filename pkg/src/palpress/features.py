"""Texture feature schemes computed over the quadrant-box ROI.

Four schemes are implemented — intensity entropy, normalized shadow area,
Laws texture-energy histograms, and local binary pattern histograms — plus
concatenation of any scheme combination. Features intentionally see only
the grayscale frame under the quadrant box mask: at inference time there is
no depth stream and no finger mask, so pressure must be read from surface
appearance alone.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import BinaryMask, EmptyRoiError, GrayImage, PalpressError, require_same_shape

__all__ = [
    "RoiTooSmallError",
    "Scheme",
    "SchemeSet",
    "FeatureConfig",
    "FeatureVector",
    "entropy_feature",
    "shadow_feature",
    "laws_masks",
    "laws_energy_maps",
    "laws_histogram",
    "lbp_histogram",
    "extract",
]


class RoiTooSmallError(PalpressError):
    """The ROI is too small for the requested feature (window/neighborhood)."""


class Scheme(enum.IntEnum):
    """One texture feature scheme; the int value fixes the canonical order."""

    ENTROPY = 0
    SHADOW = 1
    LAW = 2
    LBP = 3

    @property
    def label(self) -> str:
        return _SCHEME_LABELS[self]

    def dim(self, config: "FeatureConfig") -> int:
        if self is Scheme.ENTROPY or self is Scheme.SHADOW:
            return 1
        if self is Scheme.LAW:
            return len(LAWS_MAP_NAMES) * config.laws_bins
        return 256


_SCHEME_LABELS = {
    Scheme.ENTROPY: "Ent",
    Scheme.SHADOW: "Sha",
    Scheme.LAW: "Law",
    Scheme.LBP: "LBP",
}

_SCHEME_TOKENS = {
    "entropy": Scheme.ENTROPY,
    "ent": Scheme.ENTROPY,
    "shadow": Scheme.SHADOW,
    "sha": Scheme.SHADOW,
    "laws": Scheme.LAW,
    "law": Scheme.LAW,
    "lbp": Scheme.LBP,
}

_TOKEN_RE = re.compile(r"entropy|shadow|laws|law|lbp|ent|sha")
_SEP_RE = re.compile(r"[+,_\-/\s]+")


@dataclass(frozen=True)
class SchemeSet:
    """Non-empty, duplicate-free scheme combination in canonical order.

    Labels follow the concatenation convention of the benchmark reports:
    ``{Shadow, Law}`` is "ShaLaw", ``{Law, LBP}`` is "LawLBP", and so on.
    """

    schemes: tuple[Scheme, ...]

    def __post_init__(self) -> None:
        schemes = tuple(Scheme(s) for s in self.schemes)
        if not schemes:
            raise ValueError("scheme set must not be empty")
        if len(set(schemes)) != len(schemes):
            raise ValueError(f"duplicate schemes in {schemes}")
        object.__setattr__(self, "schemes", tuple(sorted(schemes)))

    @classmethod
    def of(cls, *schemes: Scheme) -> "SchemeSet":
        return cls(tuple(schemes))

    @classmethod
    def parse(cls, text: str) -> "SchemeSet":
        """Parse labels like "LawLBP", "sha+law", or "entropy,shadow"."""
        compact = _SEP_RE.sub("", str(text).strip().lower())
        if not compact:
            raise ValueError("empty scheme specification")
        schemes: list[Scheme] = []
        pos = 0
        while pos < len(compact):
            m = _TOKEN_RE.match(compact, pos)
            if m is None:
                raise ValueError(f"cannot parse scheme specification {text!r}")
            schemes.append(_SCHEME_TOKENS[m.group(0)])
            pos = m.end()
        return cls(tuple(schemes))

    @classmethod
    def singles(cls) -> tuple["SchemeSet", ...]:
        return tuple(cls.of(s) for s in Scheme)

    @classmethod
    def pairs(cls) -> tuple["SchemeSet", ...]:
        all_schemes = list(Scheme)
        out = []
        for i, a in enumerate(all_schemes):
            for b in all_schemes[i + 1 :]:
                out.append(cls.of(a, b))
        return tuple(out)

    @classmethod
    def all_sets(cls) -> tuple["SchemeSet", ...]:
        return cls.singles() + cls.pairs()

    @property
    def label(self) -> str:
        return "".join(s.label for s in self.schemes)

    def dim(self, config: "FeatureConfig") -> int:
        return sum(s.dim(config) for s in self.schemes)

    def __iter__(self):
        return iter(self.schemes)

    def __len__(self) -> int:
        return len(self.schemes)

    def __contains__(self, scheme: Scheme) -> bool:
        return scheme in self.schemes


@dataclass(frozen=True)
class FeatureConfig:
    """Knobs the schemes expose; defaults are the tested configuration."""

    shadow_threshold: int = 50
    laws_bins: int = 16
    laws_mean_window: int = 15

    def __post_init__(self) -> None:
        if not 0 < self.shadow_threshold <= 255:
            raise ValueError(f"shadow threshold {self.shadow_threshold} outside (0, 255]")
        if self.laws_bins < 2:
            raise ValueError("laws_bins must be >= 2")
        if self.laws_mean_window < 3 or self.laws_mean_window % 2 == 0:
            raise ValueError("laws_mean_window must be an odd integer >= 3")

    def to_dict(self) -> dict:
        return {
            "shadow_threshold": self.shadow_threshold,
            "laws_bins": self.laws_bins,
            "laws_mean_window": self.laws_mean_window,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureConfig":
        return cls(
            shadow_threshold=int(d.get("shadow_threshold", 50)),
            laws_bins=int(d.get("laws_bins", 16)),
            laws_mean_window=int(d.get("laws_mean_window", 15)),
        )


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Concatenated feature values tagged with the scheme set that made them."""

    values: np.ndarray
    scheme: SchemeSet

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64, copy=True).ravel()
        if arr.size == 0:
            raise ValueError("feature vector must not be empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("feature vector contains non-finite values")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)


def _roi_values(img: GrayImage, roi: BinaryMask) -> np.ndarray:
    require_same_shape(img, roi, "image/roi")
    values = img.pixels[roi.pixels]
    if values.size == 0:
        raise EmptyRoiError("feature extraction requires a non-empty ROI")
    return values


def entropy_feature(img: GrayImage, roi: BinaryMask) -> float:
    """Shannon entropy (bits) of the 256-bin intensity histogram over the ROI."""
    values = _roi_values(img, roi)
    counts = np.bincount(values, minlength=256)
    p = counts[counts > 0] / values.size
    return float(-(p * np.log2(p)).sum())


def shadow_feature(img: GrayImage, roi: BinaryMask, threshold: int = 50) -> float:
    """Fraction of ROI pixels darker than ``threshold`` (strict <)."""
    values = _roi_values(img, roi)
    return float(np.count_nonzero(values < threshold) / values.size)


# The five classic 1-D Laws vectors: Level, Edge, Spot, Wave, Ripple.
LAWS_VECTORS = {
    "L5": np.array([1.0, 4.0, 6.0, 4.0, 1.0]),
    "E5": np.array([-1.0, -2.0, 0.0, 2.0, 1.0]),
    "S5": np.array([-1.0, 0.0, 2.0, 0.0, -1.0]),
    "W5": np.array([-1.0, 2.0, 0.0, -2.0, 1.0]),
    "R5": np.array([1.0, -4.0, 6.0, -4.0, 1.0]),
}

#: The nine rotation-invariant energy maps, built from {L5, E5, S5, R5}:
#: the three symmetric self-pairs plus the six averaged cross pairs
#: (L5L5 is dropped — it carries illumination, not texture).
LAWS_MAP_NAMES = (
    "E5E5",
    "S5S5",
    "R5R5",
    "L5E5",
    "L5S5",
    "L5R5",
    "E5S5",
    "E5R5",
    "S5R5",
)


def laws_masks() -> dict[str, np.ndarray]:
    """All 25 5x5 Laws masks as outer products, keyed "<row><col>"."""
    return {
        f"{rn}{cn}": np.outer(rv, cv)
        for rn, rv in LAWS_VECTORS.items()
        for cn, cv in LAWS_VECTORS.items()
    }


def laws_energy_maps(patch: np.ndarray) -> dict[str, np.ndarray]:
    """Nine rotation-invariant absolute-energy maps of a mean-removed patch.

    Cross pairs average the absolute responses of the two mirrored masks
    (e.g. L5E5 and E5L5) so the map does not prefer one edge orientation.
    """
    patch = np.asarray(patch, dtype=np.float64)
    responses = {}
    for name in ("L5", "E5", "S5", "R5"):
        for other in ("L5", "E5", "S5", "R5"):
            mask = np.outer(LAWS_VECTORS[name], LAWS_VECTORS[other])
            responses[f"{name}{other}"] = ndimage.correlate(patch, mask, mode="reflect")
    maps: dict[str, np.ndarray] = {}
    for name in LAWS_MAP_NAMES:
        a, b = name[:2], name[2:]
        if a == b:
            maps[name] = np.abs(responses[name])
        else:
            maps[name] = 0.5 * (np.abs(responses[f"{a}{b}"]) + np.abs(responses[f"{b}{a}"]))
    return maps


def _roi_bbox(roi: BinaryMask) -> tuple[slice, slice]:
    rows = np.flatnonzero(roi.pixels.any(axis=1))
    cols = np.flatnonzero(roi.pixels.any(axis=0))
    return slice(rows[0], rows[-1] + 1), slice(cols[0], cols[-1] + 1)


def laws_histogram(
    img: GrayImage, roi: BinaryMask, config: FeatureConfig | None = None
) -> np.ndarray:
    """Laws texture-energy histograms over the ROI, concatenated.

    The ROI bounding-box patch is offset-normalized (ROI minimum subtracted,
    so a uniform brightness shift changes nothing), non-ROI pixels inside the
    box are filled with the ROI mean, and the local mean over a
    ``laws_mean_window`` square is removed. Each of the nine energy maps is
    scaled by its 99th-percentile ROI energy into [0, 255] and histogrammed
    over ROI pixels with ``laws_bins`` bins normalized to sum 1.
    """
    config = config or FeatureConfig()
    values = _roi_values(img, roi)
    rs, cs = _roi_bbox(roi)
    window = config.laws_mean_window
    if (rs.stop - rs.start) < window or (cs.stop - cs.start) < window:
        raise RoiTooSmallError(
            f"ROI bounding box {rs.stop - rs.start}x{cs.stop - cs.start} smaller "
            f"than the {window}x{window} mean-removal window"
        )
    roi_patch = roi.pixels[rs, cs]
    patch = img.pixels[rs, cs].astype(np.float64) - float(values.min())
    patch[~roi_patch] = patch[roi_patch].mean()
    patch -= ndimage.uniform_filter(patch, size=window, mode="reflect")

    parts = []
    for name, emap in laws_energy_maps(patch).items():
        roi_energy = emap[roi_patch]
        q99 = float(np.percentile(roi_energy, 99))
        if q99 <= 0.0:
            hist = np.zeros(config.laws_bins, dtype=np.float64)
            hist[0] = 1.0
        else:
            scaled = np.minimum(roi_energy / q99, 1.0) * 255.0
            hist, _ = np.histogram(scaled, bins=config.laws_bins, range=(0.0, 255.0))
            hist = hist / roi_energy.size
        parts.append(hist)
    return np.concatenate(parts)


# 8-neighbor offsets in bit order: top-left is the most significant bit,
# then clockwise around the center.
_LBP_OFFSETS = (
    (-1, -1, 128),
    (-1, 0, 64),
    (-1, 1, 32),
    (0, 1, 16),
    (1, 1, 8),
    (1, 0, 4),
    (1, -1, 2),
    (0, -1, 1),
)


def lbp_histogram(img: GrayImage, roi: BinaryMask) -> np.ndarray:
    """Normalized 256-bin histogram of classic 8-neighbor LBP codes.

    A pixel contributes only when its full 3x3 neighborhood lies inside the
    ROI (1-pixel interior erosion), which also keeps codes independent of
    anything outside the ROI. Comparison is neighbor >= center, so a
    constant region codes to 255.
    """
    _roi_values(img, roi)
    h, w = img.pixels.shape
    if h < 3 or w < 3:
        raise RoiTooSmallError("image smaller than the 3x3 LBP neighborhood")
    eroded = ndimage.binary_erosion(
        roi.pixels, structure=np.ones((3, 3), dtype=bool), border_value=0
    )
    centers = eroded[1:-1, 1:-1]
    if not centers.any():
        raise RoiTooSmallError("ROI is empty after 1-pixel interior erosion")
    inner = img.pixels[1:-1, 1:-1]
    codes = np.zeros(inner.shape, dtype=np.int64)
    for dy, dx, weight in _LBP_OFFSETS:
        neighbor = img.pixels[1 + dy : h - 1 + dy, 1 + dx : w - 1 + dx]
        codes += weight * (neighbor >= inner)
    selected = codes[centers]
    return np.bincount(selected, minlength=256) / selected.size


def extract(
    img: GrayImage,
    roi: BinaryMask,
    scheme: SchemeSet,
    config: FeatureConfig | None = None,
) -> FeatureVector:
    """Concatenate the selected schemes' features in canonical order."""
    config = config or FeatureConfig()
    parts = []
    for s in scheme:
        if s is Scheme.ENTROPY:
            parts.append(np.array([entropy_feature(img, roi)]))
        elif s is Scheme.SHADOW:
            parts.append(np.array([shadow_feature(img, roi, config.shadow_threshold)]))
        elif s is Scheme.LAW:
            parts.append(laws_histogram(img, roi, config))
        else:
            parts.append(lbp_histogram(img, roi))
    return FeatureVector(values=np.concatenate(parts), scheme=scheme)
