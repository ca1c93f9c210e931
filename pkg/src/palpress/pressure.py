"""Fuzzy depth-to-pressure conversion.

A clip's observed depth envelope [MIN, MAX] is divided by three anchor
depths placed at the quarter points of the span:

    a1 = MIN + 0.25 * (MAX - MIN)
    a2 = MIN + 0.50 * (MAX - MIN)
    a3 = MIN + 0.75 * (MAX - MIN)

Low membership falls linearly from 1 at a1 to 0 at a2, high membership
rises linearly from 0 at a2 to 1 at a3, and medium membership is the
complement of whichever neighbour is active. Crisp labels are the argmax
of the three memberships; at the two crossover depths, where memberships
tie at 0.5, the firmer class wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PressureLevel
from .roi import DepthStats

__all__ = [
    "PressureThresholds",
    "FuzzyMembership",
    "thresholds",
    "membership",
    "crisp_label",
    "crisp_boundaries",
]


@dataclass(frozen=True)
class PressureThresholds:
    """The three anchor depths of a clip, in millimeters (a1 < a2 < a3)."""

    a1: float
    a2: float
    a3: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.a1) and np.isfinite(self.a2) and np.isfinite(self.a3)):
            raise ValueError("thresholds must be finite")
        if not self.a1 < self.a2 < self.a3:
            raise ValueError(f"thresholds must increase: {self.a1}, {self.a2}, {self.a3}")
        # Anchors at the quarter points are equally spaced by construction;
        # reject hand-built triples that silently break that contract.
        if not np.isclose(self.a2 - self.a1, self.a3 - self.a2, rtol=1e-9, atol=1e-9):
            raise ValueError("thresholds must be equally spaced")

    @property
    def step(self) -> float:
        return self.a2 - self.a1


@dataclass(frozen=True)
class FuzzyMembership:
    """Membership grades of one depth in the three pressure classes."""

    low: float
    medium: float
    high: float

    def __post_init__(self) -> None:
        for name, g in (("low", self.low), ("medium", self.medium), ("high", self.high)):
            if not 0.0 <= g <= 1.0:
                raise ValueError(f"{name} membership {g} outside [0, 1]")

    @property
    def as_tuple(self) -> tuple[float, float, float]:
        return (self.low, self.medium, self.high)


def thresholds(stats: DepthStats) -> PressureThresholds:
    """Anchor depths at the 25/50/75% points of the observed envelope."""
    span = stats.span
    return PressureThresholds(
        a1=stats.min_mm + 0.25 * span,
        a2=stats.min_mm + 0.50 * span,
        a3=stats.min_mm + 0.75 * span,
    )


def membership(depth_mm: float, t: PressureThresholds) -> FuzzyMembership:
    """Fuzzy grades of one scalar depth against a clip's anchors.

    Grades within each active ramp sum exactly to 1 because the medium
    grade is constructed as the complement of the active neighbour.
    """
    d = float(depth_mm)
    if not np.isfinite(d):
        raise ValueError(f"depth must be finite, got {d}")
    step = t.step
    if d <= t.a1:
        return FuzzyMembership(low=1.0, medium=0.0, high=0.0)
    if d >= t.a3:
        return FuzzyMembership(low=0.0, medium=0.0, high=1.0)
    if d < t.a2:
        low = (t.a2 - d) / step
        return FuzzyMembership(low=low, medium=1.0 - low, high=0.0)
    high = (d - t.a2) / step
    return FuzzyMembership(low=0.0, medium=1.0 - high, high=high)


def crisp_label(depth_mm: float, t: PressureThresholds) -> PressureLevel:
    """Argmax of the fuzzy grades; exact ties resolve to the firmer class."""
    m = membership(depth_mm, t)
    best = max(m.as_tuple)
    if m.high == best:
        return PressureLevel.HIGH
    if m.medium == best:
        return PressureLevel.MEDIUM
    return PressureLevel.LOW


def crisp_boundaries(t: PressureThresholds) -> tuple[float, float]:
    """Depths where the crisp label switches: (low/medium, medium/high).

    These are the membership crossovers, i.e. the midpoints of adjacent
    anchors; equivalently MIN + 0.375*span and MIN + 0.625*span.
    """
    return ((t.a1 + t.a2) / 2.0, (t.a2 + t.a3) / 2.0)
