"""Sentiment-score vector extraction with negation reversal.

A sentence is scanned left to right with longest-match lexicon lookup. Every
matched sentiment word contributes one slot to a positive-score vector and the
same slot to a negative-score vector. A negator pattern found just before the
word (within a token window) swaps the two contributions. Both vectors are
then padded with zeros or truncated to a fixed length so downstream consumers
see a constant shape.

Negator patterns are matched in two surface forms: as a run of whitespace
tokens and as a single underscore-joined token. Each negator occurrence can
serve at most one sentiment word, and a token already consumed as (part of) a
sentiment word cannot double as a negator.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ParseError, ShapeError
from .lexicon import SentiLexicon, lookup_longest

DEFAULT_NEGATORS = (
    "vô",
    "bất",
    "chẳng",
    "không",
    "kém",
    "chẳng hề",
    "không bao giờ",
    "chẳng bao giờ",
)
DEFAULT_WINDOW = 2
DEFAULT_SENTI_LEN = 128


@dataclass(frozen=True)
class SentiVecConfig:
    length: int = DEFAULT_SENTI_LEN
    negation_window: int = DEFAULT_WINDOW

    def __post_init__(self):
        if self.length < 1:
            raise ConfigError(f"length must be >= 1, got {self.length}")
        if self.negation_window < 1:
            raise ConfigError(f"negation window must be >= 1, got {self.negation_window}")


def tokenize(text: str) -> tuple:
    """Whitespace tokenization; multiword lemmas stay underscore-joined."""
    return tuple(text.split())


def load_negators(path) -> tuple:
    """Negator override file: one pattern per line, tokens space-separated."""
    patterns = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            stripped = line.strip()
            if stripped and not stripped.startswith("#"):
                patterns.append(" ".join(stripped.split()))
    if not patterns:
        raise ParseError(path, None, "no negator patterns in file")
    return tuple(patterns)


@dataclass(frozen=True)
class NegationMatch:
    """One occurrence of a negator pattern over tokens[start..end] inclusive."""

    pattern: str
    start: int
    end: int

    @property
    def size(self) -> int:
        """Word count of the pattern itself, independent of surface form."""
        return len(self.pattern.split())


def find_negation_matches(tokens, negators=DEFAULT_NEGATORS) -> list:
    """All negator occurrences, at every position, in both surface forms."""
    tokens = list(tokens)
    matches = []
    for pattern in negators:
        words = pattern.split()
        joined = "_".join(words)
        for start in range(len(tokens)):
            if tokens[start] == joined:
                matches.append(NegationMatch(pattern, start, start))
            if len(words) > 1 and tokens[start : start + len(words)] == words:
                matches.append(NegationMatch(pattern, start, start + len(words) - 1))
    matches.sort(key=lambda m: (m.start, m.end))
    return matches


def _best_match(matches, position, window):
    """Prefer longer patterns, then the occurrence closest to the word."""
    best = None
    for match in matches:
        if not (position - window <= match.end <= position - 1):
            continue
        key = (match.size, match.end)
        if best is None or key > (best.size, best.end):
            best = match
    return best


def match_negation(tokens, position, negators=DEFAULT_NEGATORS, window=DEFAULT_WINDOW):
    """Best negator occurrence ending within `window` tokens before `position`.

    Returns None when no pattern qualifies.
    """
    tokens = list(tokens)
    if not 0 <= position < len(tokens):
        raise IndexError(f"position {position} out of range for {len(tokens)} tokens")
    if window < 1:
        raise ConfigError(f"negation window must be >= 1, got {window}")
    return _best_match(find_negation_matches(tokens, negators), position, window)


def vsno(values, length: int) -> np.ndarray:
    """Pad with trailing zeros or truncate to exactly `length` entries."""
    if length < 1:
        raise ConfigError(f"target length must be >= 1, got {length}")
    out = np.zeros(length, dtype=np.float64)
    values = [float(v) for v in values][:length]
    out[: len(values)] = values
    return out


@dataclass
class SentiVectors:
    """Aligned positive/negative score vectors for one sentence."""

    pos: np.ndarray
    neg: np.ndarray

    def __post_init__(self):
        self.pos = np.asarray(self.pos, dtype=np.float64)
        self.neg = np.asarray(self.neg, dtype=np.float64)
        if self.pos.ndim != 1 or self.pos.shape != self.neg.shape:
            raise ShapeError(
                f"pos/neg must be equal-length 1-D vectors, got {self.pos.shape} and {self.neg.shape}"
            )

    @property
    def length(self) -> int:
        return self.pos.shape[0]


def extract_senti_vectors(
    tokens,
    lexicon: SentiLexicon,
    negators=DEFAULT_NEGATORS,
    config: SentiVecConfig = SentiVecConfig(),
) -> SentiVectors:
    """Scan tokens, look up sentiment scores, reverse negated ones, fix length.

    Claiming rules keep the scan deterministic: a sentiment word takes the
    best still-unclaimed negator occurrence before it; a claimed occurrence's
    tokens stop being lookup candidates; sentiment consumption wins over later
    negator use of the same token.
    """
    length = config.length
    window = config.negation_window
    tokens = list(tokens)
    matches = find_negation_matches(tokens, negators)
    blocked = set()  # token indices spent on sentiment words or claimed negators
    claimed = set()  # ids of claimed matches
    pos_scores = []
    neg_scores = []
    position = 0
    while position < len(tokens):
        if position in blocked:
            position += 1
            continue
        hit = lookup_longest(lexicon, tokens, position)
        if hit is None:
            position += 1
            continue
        entry, span = hit
        usable = {
            i: m
            for i, m in enumerate(matches)
            if i not in claimed
            and not any(t in blocked for t in range(m.start, m.end + 1))
        }
        best = _best_match(usable.values(), position, window)
        if best is not None:
            claimed.add(next(i for i, m in usable.items() if m is best))
            blocked.update(range(best.start, best.end + 1))
            pos_scores.append(entry.neg_score)
            neg_scores.append(entry.pos_score)
        else:
            pos_scores.append(entry.pos_score)
            neg_scores.append(entry.neg_score)
        blocked.update(range(position, position + span))
        position += span
    return SentiVectors(pos=vsno(pos_scores, length), neg=vsno(neg_scores, length))
