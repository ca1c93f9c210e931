"""Deterministic synthetic RGB-D palpation clips.

Each clip renders a breast-dome depth scene with a palpating finger disc
whose depth sweeps the configured (cup, quadrant) envelope through smooth
press-release cycles. Grayscale shading couples to indentation — a deeper
press darkens and widens a shadow annulus around the finger — so texture
features genuinely carry pressure signal and the learning benchmark is not
vacuous. Everything is a pure function of (config, seed).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import ndimage

from .core import (
    BinaryMask,
    Clip,
    CupSize,
    DepthFrame,
    Frame,
    GrayImage,
    MaskPair,
    PressureLevel,
    Quadrant,
    Rng,
)
from .pressure import crisp_label, thresholds
from .roi import DepthStats

__all__ = [
    "DEPTH_ENVELOPES_MM",
    "DEFAULT_SPLIT_COUNTS",
    "APEX_PROTRUSION_MM",
    "SynthConfig",
    "SynthClip",
    "SynthCorpus",
    "generate_clip",
    "generate_corpus",
    "cell_order",
]

#: Reference per-(cup, quadrant) scalar depth envelopes (MIN, MAX) in mm.
DEPTH_ENVELOPES_MM: dict[tuple[CupSize, Quadrant], tuple[float, float]] = {
    (CupSize.A, Quadrant.LEFT_Q2): (762.0, 794.0),
    (CupSize.A, Quadrant.LEFT_Q3): (744.0, 771.0),
    (CupSize.A, Quadrant.RIGHT_Q2): (772.0, 790.0),
    (CupSize.A, Quadrant.RIGHT_Q3): (771.0, 801.0),
    (CupSize.B, Quadrant.LEFT_Q2): (607.0, 678.0),
    (CupSize.B, Quadrant.LEFT_Q3): (603.0, 617.0),
    (CupSize.B, Quadrant.RIGHT_Q2): (619.0, 684.0),
    (CupSize.B, Quadrant.RIGHT_Q3): (614.0, 658.0),
    (CupSize.C, Quadrant.LEFT_Q2): (568.0, 609.0),
    (CupSize.C, Quadrant.LEFT_Q3): (563.0, 607.0),
    (CupSize.C, Quadrant.RIGHT_Q2): (591.0, 668.0),
    (CupSize.C, Quadrant.RIGHT_Q3): (597.0, 673.0),
}

#: Reference corpus plan: (train frames, test frames) per (cup, quadrant).
DEFAULT_SPLIT_COUNTS: dict[tuple[CupSize, Quadrant], tuple[int, int]] = {
    (CupSize.A, Quadrant.LEFT_Q2): (101, 18),
    (CupSize.A, Quadrant.LEFT_Q3): (120, 21),
    (CupSize.A, Quadrant.RIGHT_Q2): (105, 18),
    (CupSize.A, Quadrant.RIGHT_Q3): (99, 18),
    (CupSize.B, Quadrant.LEFT_Q2): (142, 25),
    (CupSize.B, Quadrant.LEFT_Q3): (113, 19),
    (CupSize.B, Quadrant.RIGHT_Q2): (120, 21),
    (CupSize.B, Quadrant.RIGHT_Q3): (108, 19),
    (CupSize.C, Quadrant.LEFT_Q2): (61, 11),
    (CupSize.C, Quadrant.LEFT_Q3): (85, 15),
    (CupSize.C, Quadrant.RIGHT_Q2): (75, 13),
    (CupSize.C, Quadrant.RIGHT_Q3): (81, 14),
}

#: Dome apex protrusion toward the camera. Larger cups sit closer to the
#: camera, hence protrude more from the background plane.
APEX_PROTRUSION_MM = {CupSize.A: 25.0, CupSize.B: 45.0, CupSize.C: 65.0}

_BACKGROUND_OFFSET_MM = 60.0
_LIGHT_DIR = np.array([0.35, -0.25, 0.9]) / np.linalg.norm([0.35, -0.25, 0.9])


@dataclass(frozen=True)
class SynthConfig:
    cup: CupSize
    quadrant: Quadrant
    n_frames: int
    seed: int = 0
    frame_size: int = 128
    noise_sigma: float = 4.0
    palpation_cycles: int = 6

    def __post_init__(self) -> None:
        if self.n_frames < 2:
            raise ValueError("n_frames must be >= 2")
        if self.frame_size < 64:
            raise ValueError("frame_size must be >= 64")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.palpation_cycles < 1:
            raise ValueError("palpation_cycles must be >= 1")

    @property
    def envelope(self) -> tuple[float, float]:
        return DEPTH_ENVELOPES_MM[(self.cup, self.quadrant)]

    def to_dict(self) -> dict:
        return {
            "cup": self.cup.value,
            "quadrant": self.quadrant.value,
            "n_frames": self.n_frames,
            "seed": self.seed,
            "frame_size": self.frame_size,
            "noise_sigma": self.noise_sigma,
            "palpation_cycles": self.palpation_cycles,
        }


@dataclass(frozen=True, eq=False)
class SynthClip:
    """Generated frames plus the ground truth that made them."""

    frames: tuple[Frame, ...]
    truth_depths: tuple[float, ...]
    stats: DepthStats

    def intended_labels(self) -> tuple[PressureLevel, ...]:
        t = thresholds(self.stats)
        return tuple(crisp_label(d, t) for d in self.truth_depths)


def _waveform(config: SynthConfig, gen: np.random.Generator) -> np.ndarray:
    """Press-release depth sweep hitting the envelope endpoints exactly."""
    lo, hi = config.envelope
    span = hi - lo
    t = np.arange(config.n_frames, dtype=np.float64)
    phase = 2.0 * np.pi * config.palpation_cycles * t / config.n_frames
    depth = lo + span * (1.0 - np.cos(phase)) / 2.0
    depth = depth + gen.normal(0.0, 0.02 * span, size=config.n_frames)
    depth = np.clip(depth, lo, hi)
    if depth.max() == depth.min():
        depth = np.linspace(lo, hi, config.n_frames)
    else:
        depth = lo + (depth - depth.min()) * (span / (depth.max() - depth.min()))
        depth = np.clip(depth, lo, hi)
    # Pin the extremes so the observed clip envelope equals the configured one.
    depth[int(np.argmin(depth))] = lo
    depth[int(np.argmax(depth))] = hi
    return depth


def _box_mask(size: int, quadrant: Quadrant) -> np.ndarray:
    margin = size // 8
    side = 3 * size // 4
    offset = size // 16
    oy = -offset if quadrant in (Quadrant.LEFT_Q2, Quadrant.RIGHT_Q2) else offset
    ox = -offset if quadrant in (Quadrant.LEFT_Q2, Quadrant.LEFT_Q3) else offset
    top, left = margin + oy, margin + ox
    mask = np.zeros((size, size), dtype=bool)
    mask[top : top + side, left : left + side] = True
    return mask


def _disc_mask(size: int, cy: float, cx: float, radius: float) -> np.ndarray:
    yy, xx = np.mgrid[0:size, 0:size]
    return (yy - cy) ** 2 + (xx - cx) ** 2 <= radius**2


def generate_clip(config: SynthConfig) -> SynthClip:
    size = config.frame_size
    lo, hi = config.envelope
    span = hi - lo
    wave_rng, frame_rng = Rng(config.seed).split(2)
    truth = _waveform(config, wave_rng.generator)
    gen = frame_rng.generator

    background = hi + _BACKGROUND_OFFSET_MM
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    center = (size - 1) / 2.0
    dome_r = 0.6 * size
    radial = ((yy - center) ** 2 + (xx - center) ** 2) / dome_r**2
    dome_depth = background - APEX_PROTRUSION_MM[config.cup] * np.clip(1.0 - radial, 0.0, None)

    box = _box_mask(size, config.quadrant)
    box_rows = np.flatnonzero(box.any(axis=1))
    box_cols = np.flatnonzero(box.any(axis=0))
    box_cy = (box_rows[0] + box_rows[-1]) / 2.0
    box_cx = (box_cols[0] + box_cols[-1]) / 2.0
    disc_r = size / 10.0

    frames = []
    for i in range(config.n_frames):
        depth_mm = float(truth[i])
        press = (depth_mm - lo) / span

        wobble = gen.integers(-2, 3, size=2)
        cy, cx = box_cy + wobble[0], box_cx + wobble[1]
        disc = _disc_mask(size, cy, cx, disc_r)

        depth = dome_depth.copy()
        depth[disc] = depth_mm

        # Lambertian-ish shading from the depth gradient.
        gy, gx = np.gradient(depth)
        denom = np.sqrt(1.0 + gx**2 + gy**2)
        shade = np.clip(
            (-gx * _LIGHT_DIR[0] - gy * _LIGHT_DIR[1] + _LIGHT_DIR[2]) / denom, 0.0, 1.0
        )
        gray = 60.0 + 150.0 * shade

        # Indentation shadow: a dark patch over the finger fading out across
        # an annulus whose reach and darkness both grow with press depth.
        dist = np.sqrt((yy - cy) ** 2 + (xx - cx) ** 2)
        outer = disc_r * (1.5 + press)
        fall = np.clip((outer - dist) / (outer - disc_r), 0.0, 1.0)
        gray = gray - (60.0 + 160.0 * press) * fall

        coarse = gen.normal(0.0, config.noise_sigma, size=(size // 8 + 1, size // 8 + 1))
        blocks = np.kron(coarse, np.ones((8, 8)))[:size, :size]
        value_noise = ndimage.uniform_filter(blocks, size=9, mode="reflect")
        speckle = gen.normal(0.0, config.noise_sigma / 2.0, size=(size, size))
        gray = np.clip(gray + value_noise + speckle, 0.0, 255.0)

        depth_u16 = np.floor(depth + 0.5).astype(np.uint16)
        roi = disc & box
        roi_idx = np.flatnonzero(roi)
        n_holes = int(round(0.01 * roi_idx.size))
        if n_holes:
            holes = gen.choice(roi_idx, size=n_holes, replace=False)
            depth_u16.flat[holes] = 0

        frames.append(
            Frame(
                gray=GrayImage(np.floor(gray + 0.5).astype(np.uint8)),
                depth=DepthFrame(depth_u16),
                masks=MaskPair(box=BinaryMask(box), finger=BinaryMask(disc)),
            )
        )

    return SynthClip(
        frames=tuple(frames),
        truth_depths=tuple(float(d) for d in truth),
        stats=DepthStats(min_mm=lo, max_mm=hi),
    )


def cell_order() -> tuple[tuple[CupSize, Quadrant], ...]:
    """Canonical (cup, quadrant) iteration order for corpora and reports."""
    return tuple((cup, quadrant) for cup in CupSize for quadrant in Quadrant)


@dataclass(frozen=True, eq=False)
class SynthCorpus:
    """Generated clips plus per-clip ground truth for oracle checks."""

    clips: tuple[Clip, ...]
    truth_depths: dict[str, tuple[float, ...]]
    intended_labels: dict[str, tuple[PressureLevel, ...]]
    stats: dict[str, DepthStats]

    def counts(self) -> dict[tuple[CupSize, Quadrant], tuple[int, int]]:
        out: dict[tuple[CupSize, Quadrant], list[int]] = {}
        for clip in self.clips:
            cell = out.setdefault((clip.cup, clip.quadrant), [0, 0])
            cell[0 if clip.split == "train" else 1] += clip.n_frames
        return {k: (v[0], v[1]) for k, v in out.items()}


def generate_corpus(
    plan: Mapping[tuple[CupSize, Quadrant], tuple[int, int]] | None = None,
    seed: int = 0,
    frame_size: int = 128,
    noise_sigma: float = 4.0,
    palpation_cycles: int = 6,
) -> SynthCorpus:
    """One train clip and one test clip per planned (cup, quadrant) cell.

    Train and test frames come from disjoint clips with independent seeds,
    all derived from the master seed, so the corpus is reproducible and the
    split leaks nothing.
    """
    plan = DEFAULT_SPLIT_COUNTS if plan is None else dict(plan)
    master = Rng(seed).generator
    clips: list[Clip] = []
    truth: dict[str, tuple[float, ...]] = {}
    intended: dict[str, tuple[PressureLevel, ...]] = {}
    stats: dict[str, DepthStats] = {}
    for cup, quadrant in cell_order():
        if (cup, quadrant) not in plan:
            continue
        n_train, n_test = plan[(cup, quadrant)]
        for split, n_frames in (("train", n_train), ("test", n_test)):
            clip_seed = int(master.integers(0, 2**63))
            if n_frames == 0:
                continue
            config = SynthConfig(
                cup=cup,
                quadrant=quadrant,
                n_frames=n_frames,
                seed=clip_seed,
                frame_size=frame_size,
                noise_sigma=noise_sigma,
                palpation_cycles=palpation_cycles,
            )
            generated = generate_clip(config)
            clip_id = f"{cup.value.lower()}_{quadrant.value}_{split}"
            clips.append(
                Clip(
                    clip_id=clip_id,
                    cup=cup,
                    quadrant=quadrant,
                    split=split,
                    frames=generated.frames,
                )
            )
            truth[clip_id] = generated.truth_depths
            intended[clip_id] = generated.intended_labels()
            stats[clip_id] = generated.stats
    return SynthCorpus(
        clips=tuple(clips),
        truth_depths=truth,
        intended_labels=intended,
        stats=stats,
    )
