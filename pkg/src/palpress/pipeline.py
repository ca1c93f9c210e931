"""Orchestration: clips -> per-frame labels -> per-scheme datasets.

Labeling runs the depth path (mask intersection, scalar reduction, fuzzy
conversion) per clip. Feature datasets run the texture path over the
quadrant box mask only — the classifiers never see depth or finger masks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import Clip, CupSize, DegenerateClipError, PressureLevel, Quadrant
from .features import FeatureConfig, FeatureVector, Scheme, SchemeSet, extract
from .learn import Dataset, LabeledSample, SampleMeta
from .pressure import PressureThresholds, crisp_boundaries, crisp_label, thresholds
from .roi import REDUCERS, DepthStats, clip_depth_stats, extract_scalar_depth, intersect_masks

__all__ = [
    "FrameLabel",
    "ClipLabels",
    "CellRow",
    "LabelTable",
    "label_clips",
    "build_datasets",
]


@dataclass(frozen=True)
class FrameLabel:
    frame_index: int
    depth_mm: float
    label: PressureLevel


@dataclass(frozen=True, eq=False)
class ClipLabels:
    """Labeling result of one clip: its envelope, cut points, and frames."""

    clip_id: str
    cup: CupSize
    quadrant: Quadrant
    split: str
    stats: DepthStats
    cuts: PressureThresholds
    frames: tuple[FrameLabel, ...]
    skipped: tuple[int, ...]

    @property
    def boundaries(self) -> tuple[float, float]:
        return crisp_boundaries(self.cuts)


@dataclass(frozen=True)
class CellRow:
    """Aggregated depth ranges of one (cup, quadrant) cell."""

    cup: CupSize
    quadrant: Quadrant
    stats: DepthStats
    cuts: PressureThresholds

    @property
    def boundaries(self) -> tuple[float, float]:
        return crisp_boundaries(self.cuts)


@dataclass(frozen=True, eq=False)
class LabelTable:
    clips: tuple[ClipLabels, ...]
    reducer: str

    @property
    def n_frames(self) -> int:
        return sum(len(c.frames) for c in self.clips)

    def label_of(self) -> dict[tuple[str, int], FrameLabel]:
        return {
            (clip.clip_id, frame.frame_index): frame
            for clip in self.clips
            for frame in clip.frames
        }

    def cell_rows(self) -> tuple[CellRow, ...]:
        """One row per (cup, quadrant): the union envelope of its clips."""
        groups: dict[tuple[CupSize, Quadrant], list[ClipLabels]] = {}
        for clip in self.clips:
            groups.setdefault((clip.cup, clip.quadrant), []).append(clip)
        rows = []
        for (cup, quadrant) in sorted(groups, key=lambda k: (k[0].value, k[1].value)):
            members = groups[(cup, quadrant)]
            stats = DepthStats(
                min_mm=min(c.stats.min_mm for c in members),
                max_mm=max(c.stats.max_mm for c in members),
            )
            rows.append(CellRow(cup=cup, quadrant=quadrant, stats=stats, cuts=thresholds(stats)))
        return tuple(rows)

    def to_json_dict(self) -> dict:
        def range_fields(stats: DepthStats, cuts: PressureThresholds) -> dict:
            low_med, med_high = crisp_boundaries(cuts)
            return {
                "min_mm": stats.min_mm,
                "max_mm": stats.max_mm,
                "a1": cuts.a1,
                "a2": cuts.a2,
                "a3": cuts.a3,
                "low_med": low_med,
                "med_high": med_high,
            }

        return {
            "format_version": "1",
            "reducer": self.reducer,
            "cells": [
                {"cup": row.cup.value, "quadrant": row.quadrant.value}
                | range_fields(row.stats, row.cuts)
                for row in self.cell_rows()
            ],
            "clips": [
                {
                    "id": clip.clip_id,
                    "cup": clip.cup.value,
                    "quadrant": clip.quadrant.value,
                    "split": clip.split,
                    "skipped_frames": list(clip.skipped),
                    "frames": [
                        {
                            "frame_index": f.frame_index,
                            "depth_mm": f.depth_mm,
                            "label": f.label.label,
                        }
                        for f in clip.frames
                    ],
                }
                | range_fields(clip.stats, clip.cuts)
                for clip in self.clips
            ],
        }


def label_clips(clips: Iterable[Clip], reducer: str = "median") -> LabelTable:
    """Depth-label every frame of every clip against its own envelope.

    Frames whose ROI has no valid depth reading are skipped, never imputed.
    A clip whose remaining scalars collapse to one value is a hard error.
    """
    if reducer not in REDUCERS:
        raise ValueError(f"unknown reducer {reducer!r}; expected one of {REDUCERS}")
    labeled = []
    for clip in clips:
        scalars = []
        kept_indices = []
        skipped = []
        for i, frame in enumerate(clip.frames):
            roi = intersect_masks(frame.masks)
            scalar = extract_scalar_depth(frame.depth, roi, reducer)
            if scalar is None:
                skipped.append(i)
                continue
            scalars.append(scalar)
            kept_indices.append(i)
        try:
            stats = clip_depth_stats(scalars)
        except DegenerateClipError as exc:
            raise DegenerateClipError(f"clip {clip.clip_id!r}: {exc}") from exc
        cuts = thresholds(stats)
        frames = tuple(
            FrameLabel(frame_index=i, depth_mm=s.value, label=crisp_label(s.value, cuts))
            for i, s in zip(kept_indices, scalars)
        )
        labeled.append(
            ClipLabels(
                clip_id=clip.clip_id,
                cup=clip.cup,
                quadrant=clip.quadrant,
                split=clip.split,
                stats=stats,
                cuts=cuts,
                frames=frames,
                skipped=tuple(skipped),
            )
        )
    return LabelTable(clips=tuple(labeled), reducer=reducer)


def build_datasets(
    clips: Sequence[Clip],
    labels: LabelTable,
    schemes: Sequence[Scheme] = tuple(Scheme),
    config: FeatureConfig | None = None,
) -> dict[Scheme, Dataset]:
    """Single-scheme datasets over the labeled frames of all clips.

    All returned datasets enumerate the same frames in the same order, so
    they can be concatenated into combined-scheme datasets downstream.
    """
    config = config or FeatureConfig()
    by_clip = {c.clip_id: c for c in labels.clips}
    samples: dict[Scheme, dict[str, list[LabeledSample]]] = {
        s: {"train": [], "test": []} for s in schemes
    }
    for clip in clips:
        clip_labels = by_clip.get(clip.clip_id)
        if clip_labels is None:
            raise ValueError(f"clip {clip.clip_id!r} missing from label table")
        for frame_label in clip_labels.frames:
            frame = clip.frames[frame_label.frame_index]
            meta = SampleMeta(
                cup=clip.cup,
                quadrant=clip.quadrant,
                clip_id=clip.clip_id,
                frame_index=frame_label.frame_index,
            )
            for scheme in schemes:
                vector = extract(frame.gray, frame.masks.box, SchemeSet.of(scheme), config)
                samples[scheme][clip.split].append(
                    LabeledSample(features=vector, label=frame_label.label, meta=meta)
                )
    return {
        scheme: Dataset(
            train=tuple(buckets["train"]),
            test=tuple(buckets["test"]),
            scheme=SchemeSet.of(scheme),
        )
        for scheme, buckets in samples.items()
    }
