"""Shared fixtures: a small hand-written lexicon and a seeded rng factory."""

import numpy as np
import pytest

from visenti import SentiEntry, SentiLexicon


@pytest.fixture
def tiny_lexicon():
    # two clear positives, two clear negatives, one multiword positive,
    # one mixed entry that must never become a seed
    entries = [
        SentiEntry(lemma="tốt", pos_tag="adjective", pos_score=0.9, neg_score=0.0),
        SentiEntry(lemma="đẹp", pos_tag="adjective", pos_score=0.8, neg_score=0.0),
        SentiEntry(lemma="xấu", pos_tag="adjective", pos_score=0.0, neg_score=0.85),
        SentiEntry(lemma="tệ", pos_tag="adjective", pos_score=0.0, neg_score=0.95),
        SentiEntry(lemma="hết_ý", pos_tag="adjective", pos_score=0.75, neg_score=0.0),
        SentiEntry(lemma="tạm", pos_tag="adjective", pos_score=0.3, neg_score=0.2),
    ]
    return SentiLexicon.from_entries(entries, name="tiny")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
