"""Synthetic sentiment corpus whose gold labels are fully determined by
lexicon words and negators.

Each review mixes filler tokens with a few sentiment words, some negated by a
negator placed immediately before the word (occasionally in underscore-joined
form). The label is the sign of the summed polarity evidence after reversal,
and generation resamples until the evidence margin is comfortable and the
vector extractor provably agrees with the intended label. A text encoder gets
no signal: fillers carry no polarity, so only the extracted score vectors
separate the classes. That asymmetry is what the ablation harness measures.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .lexicon import SentiEntry, SentiLexicon
from .sentivec import DEFAULT_NEGATORS, SentiVecConfig, extract_senti_vectors

SINGLE_NEGATORS = ("vô", "bất", "chẳng", "không", "kém")
JOINED_NEGATORS = ("chẳng_hề", "không_bao_giờ", "chẳng_bao_giờ")


@dataclass(frozen=True)
class SyntheticConfig:
    seed: int
    train_size: int = 400
    test_size: int = 100
    positive_words: int = 6
    negative_words: int = 6
    filler_words: int = 30
    min_len: int = 4
    max_len: int = 12
    max_sentiment: int = 3
    negation_prob: float = 0.3
    joined_negator_prob: float = 0.2
    margin: float = 0.3
    labels: tuple = ("NEG", "POS")

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != 2:
            raise ConfigError(f"synthetic corpus is binary, got labels {self.labels}")
        for name in ("train_size", "test_size", "positive_words", "negative_words",
                     "filler_words", "min_len", "max_sentiment"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.max_len < self.min_len:
            raise ConfigError(f"max_len {self.max_len} < min_len {self.min_len}")
        if not 0.0 <= self.negation_prob <= 1.0:
            raise ConfigError(f"negation_prob must be in [0, 1], got {self.negation_prob}")
        if not 0.0 < self.margin:
            raise ConfigError(f"margin must be positive, got {self.margin}")


@dataclass(frozen=True)
class SyntheticCorpus:
    lexicon: SentiLexicon
    train_rows: list
    test_rows: list
    labels: tuple


def _build_lexicon(config: SyntheticConfig, rng) -> SentiLexicon:
    entries = []
    for k in range(config.positive_words):
        entries.append(
            SentiEntry(
                lemma=f"pos{k}",
                pos_tag="adjective",
                pos_score=float(rng.uniform(0.6, 0.95)),
                neg_score=0.0,
            )
        )
    for k in range(config.negative_words):
        entries.append(
            SentiEntry(
                lemma=f"neg{k}",
                pos_tag="adjective",
                pos_score=0.0,
                neg_score=float(rng.uniform(0.6, 0.95)),
            )
        )
    return SentiLexicon.from_entries(entries, name="synthetic")


def _one_review(config, rng, lexicon, lemmas, fillers, target, sv_config, max_tries=2000):
    for _ in range(max_tries):
        k = int(rng.integers(1, config.max_sentiment + 1))
        filler_count = int(rng.integers(config.min_len, config.max_len + 1))
        units = []
        picked = []
        for _ in range(k):
            lemma = lemmas[int(rng.integers(len(lemmas)))]
            negated = bool(rng.random() < config.negation_prob)
            if negated:
                if rng.random() < config.joined_negator_prob:
                    negator = JOINED_NEGATORS[int(rng.integers(len(JOINED_NEGATORS)))]
                else:
                    negator = SINGLE_NEGATORS[int(rng.integers(len(SINGLE_NEGATORS)))]
                units.append([negator, lemma])
            else:
                units.append([lemma])
            picked.append((lemma, negated))
        for _ in range(filler_count):
            units.append([fillers[int(rng.integers(len(fillers)))]])
        order = rng.permutation(len(units))
        tokens = [token for index in order for token in units[int(index)]]
        pos_evidence = neg_evidence = 0.0
        for lemma, negated in picked:
            entry = lexicon.get(lemma)
            p, n = entry.pos_score, entry.neg_score
            if negated:
                p, n = n, p
            pos_evidence += p
            neg_evidence += n
        if abs(pos_evidence - neg_evidence) < config.margin:
            continue
        label = 1 if pos_evidence > neg_evidence else 0
        if label != target:
            continue
        # construction should make the extractor agree; resample if it ever doesn't
        sv = extract_senti_vectors(tokens, lexicon, DEFAULT_NEGATORS, sv_config)
        if (float(sv.pos.sum()) > float(sv.neg.sum())) != (label == 1):
            continue
        return " ".join(tokens), label
    raise DataError("could not synthesize a review satisfying the margin; loosen the config")


def generate(config: SyntheticConfig) -> SyntheticCorpus:
    """Alternating-label generation keeps both splits exactly balanced."""
    rng = np.random.default_rng(config.seed)
    lexicon = _build_lexicon(config, rng)
    lemmas = sorted(lexicon.entries)
    fillers = [f"fill{k}" for k in range(config.filler_words)]
    sv_length = max(16, config.max_sentiment)
    sv_config = SentiVecConfig(length=sv_length, negation_window=2)
    splits = []
    for size in (config.train_size, config.test_size):
        rows = []
        for index in range(size):
            text, label = _one_review(
                config, rng, lexicon, lemmas, fillers, index % 2, sv_config
            )
            rows.append((label, text))
        splits.append(rows)
    return SyntheticCorpus(
        lexicon=lexicon, train_rows=splits[0], test_rows=splits[1], labels=config.labels
    )
