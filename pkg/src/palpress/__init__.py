"""Depth-guided palpation pressure estimation from synthetic RGB-D clips.

The package covers the full loop: synthesizing palpation clips, labeling
frames by fingertip depth against per-clip fuzzy thresholds, extracting
grayscale texture features, and benchmarking small from-scratch classifiers.
"""

from .core import (
    BinaryMask,
    Clip,
    CupSize,
    DegenerateClipError,
    DepthFrame,
    DimensionError,
    EmptyRoiError,
    Frame,
    GrayImage,
    MaskPair,
    PalpressError,
    PressureLevel,
    Quadrant,
    Rng,
)
from .features import FeatureConfig, FeatureVector, RoiTooSmallError, Scheme, SchemeSet, extract
from .learn import (
    BASELINE_ACCURACY,
    BenchmarkTable,
    BenchRow,
    Dataset,
    EvalReport,
    LabeledSample,
    ModelKind,
    SampleMeta,
    SingleClassError,
    TrainedModel,
    benchmark,
    combine_datasets,
    evaluate,
    train_model,
)
from .pipeline import LabelTable, build_datasets, label_clips
from .pressure import FuzzyMembership, PressureThresholds, crisp_label, membership, thresholds
from .roi import DepthStats, RoiDepth, clip_depth_stats, extract_scalar_depth, intersect_masks
from .synth import SynthConfig, generate_clip, generate_corpus

__version__ = "0.1.0"

__all__ = [
    "BASELINE_ACCURACY",
    "BenchRow",
    "BenchmarkTable",
    "BinaryMask",
    "Clip",
    "CupSize",
    "Dataset",
    "DegenerateClipError",
    "DepthFrame",
    "DepthStats",
    "DimensionError",
    "EmptyRoiError",
    "EvalReport",
    "FeatureConfig",
    "FeatureVector",
    "Frame",
    "FuzzyMembership",
    "GrayImage",
    "LabelTable",
    "LabeledSample",
    "MaskPair",
    "ModelKind",
    "PalpressError",
    "PressureLevel",
    "PressureThresholds",
    "Quadrant",
    "Rng",
    "RoiDepth",
    "RoiTooSmallError",
    "SampleMeta",
    "Scheme",
    "SchemeSet",
    "SingleClassError",
    "SynthConfig",
    "TrainedModel",
    "benchmark",
    "build_datasets",
    "clip_depth_stats",
    "combine_datasets",
    "crisp_label",
    "evaluate",
    "extract",
    "extract_scalar_depth",
    "generate_clip",
    "generate_corpus",
    "intersect_masks",
    "label_clips",
    "membership",
    "thresholds",
    "train_model",
    "__version__",
]
