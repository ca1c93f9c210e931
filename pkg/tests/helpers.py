"""Shared helpers: tiny deterministic datasets for learner tests."""

from __future__ import annotations

import numpy as np

from palpress.core import CupSize, PressureLevel, Quadrant
from palpress.features import FeatureVector, Scheme, SchemeSet
from palpress.learn import Dataset, LabeledSample, SampleMeta

ENT_SET = SchemeSet.of(Scheme.ENTROPY)


def gaussian_blobs(n_per_class=40, scale=0.6, seed=11):
    """Three well-separated 2-D gaussian blobs; linearly separable."""
    gen = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [6.0, 0.0], [0.0, 6.0]])
    xs, ys = [], []
    for label, center in enumerate(centers):
        xs.append(center + scale * gen.standard_normal((n_per_class, 2)))
        ys.append(np.full(n_per_class, label))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    order = gen.permutation(len(y))
    return x[order], y[order]


def xor_blobs(n_per_cluster=30, scale=0.35, seed=23):
    """Class 0 and 1 interleave in an XOR layout; class 2 sits apart.

    No linear boundary separates 0 from 1, but an axis-aligned tree of
    depth two does, so tree learners beat linear ones by a wide margin.
    """
    gen = np.random.default_rng(seed)
    clusters = [
        (0, (0.0, 0.0)),
        (0, (4.0, 4.0)),
        (1, (0.0, 4.0)),
        (1, (4.0, 0.0)),
        (2, (10.0, 2.0)),
        (2, (11.0, 2.5)),
    ]
    xs, ys = [], []
    for label, center in clusters:
        xs.append(np.asarray(center) + scale * gen.standard_normal((n_per_cluster, 2)))
        ys.append(np.full(n_per_cluster, label))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    order = gen.permutation(len(y))
    return x[order], y[order]


def random_gray(gen, size=32):
    """Uniform random uint8 image."""
    return gen.integers(0, 256, size=(size, size), dtype=np.uint8)


def full_mask(size=32):
    return np.ones((size, size), dtype=bool)


def make_dataset(x_train, y_train, x_test, y_test, scheme_set=None):
    """Wrap raw arrays in a Dataset with synthetic metadata."""
    return Dataset.from_arrays(x_train, y_train, x_test, y_test, scheme=scheme_set)


def single_sample(values, label, scheme_set=ENT_SET, clip_id="c", frame_index=0):
    return LabeledSample(
        features=FeatureVector(values=np.asarray(values, dtype=np.float64), scheme=scheme_set),
        label=PressureLevel(label),
        meta=SampleMeta(
            cup=CupSize.A, quadrant=Quadrant.LEFT_Q2, clip_id=clip_id, frame_index=frame_index
        ),
    )
