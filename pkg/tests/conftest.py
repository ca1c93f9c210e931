"""Session-wide fixtures.

The expensive fixtures (full default corpus, its labels, the Law/LBP feature
datasets) are built once per session and shared between the synth tests, the
label-recovery check, and the end-to-end benchmark.
"""

from __future__ import annotations

import pytest

from palpress import pipeline
from palpress.features import Scheme
from palpress.synth import generate_corpus


@pytest.fixture(scope="session")
def default_corpus():
    """Full reference-plan corpus, seed 0: 24 clips, 1210 train / 212 test frames."""
    return generate_corpus(seed=0)


@pytest.fixture(scope="session")
def default_labels(default_corpus):
    return pipeline.label_clips(default_corpus.clips)


@pytest.fixture(scope="session")
def texture_singles(default_corpus, default_labels):
    """Law and LBP single-scheme datasets over the full corpus."""
    return pipeline.build_datasets(
        default_corpus.clips, default_labels, schemes=(Scheme.LAW, Scheme.LBP)
    )


@pytest.fixture(scope="session")
def tiny_corpus_dir(tmp_path_factory):
    """A small on-disk dataset (6 train / 4 test frames per cell) for CLI tests."""
    from palpress import dataio
    from palpress.synth import cell_order

    out = tmp_path_factory.mktemp("tinydata")
    plan = {cell: (6, 4) for cell in cell_order()}
    corpus = generate_corpus(plan, seed=13, frame_size=96)
    dataio.save_dataset(corpus.clips, out)
    return out
