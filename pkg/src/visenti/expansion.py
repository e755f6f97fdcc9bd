"""Lexicon expansion: seed extraction, polarity propagation, distance scoring.

Strongly polar entries seed two word sets. A synonym/antonym thesaurus graph
grows the sets breadth-first (synonyms keep polarity, antonyms flip it);
words pulled toward both polarities are quarantined as conflicts. Candidate
words are then scored by their mean embedding distance to each seed set and
admitted as expanded entries whose positive and negative scores sum to one.

Two score orientations are available. `literal` maps a LARGE distance to the
positive seeds to a HIGH positive score (pos = d_pos / (d_pos + d_neg));
`proximal` is its reflection (pos = d_neg / (d_pos + d_neg)) and is the
default, since closeness-means-membership is the only reading under which
expansion enriches the lexicon rather than inverting it. Both are kept so the
choice stays visible and testable.

Thesaurus files are TSV: ``lemma<TAB>lemma<TAB>rel`` with rel in {syn, ant}.
Both relations are symmetric; self-loops are rejected.
"""

from dataclasses import dataclass, field

import numpy as np

from .embeddings import EmbeddingTable, distance
from .errors import (
    ConfigError,
    DataError,
    DistanceError,
    NoSeedsError,
    ParseError,
    UnscorableError,
)
from .lexicon import SentiEntry, SentiLexicon

SCORE_EPS = 1e-12
ORIENTATIONS = ("literal", "proximal")


@dataclass(frozen=True)
class ExpansionConfig:
    threshold: float = 0.5
    depth: int = 1
    metric: str = "cosine"
    orientation: str = "proximal"
    min_seed_hits: int = 1

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError(f"threshold must be in (0, 1), got {self.threshold}")
        if self.depth < 0:
            raise ConfigError(f"depth must be >= 0, got {self.depth}")
        if self.metric not in ("cosine", "euclidean"):
            raise ConfigError(f"metric must be cosine or euclidean, got {self.metric!r}")
        if self.orientation not in ORIENTATIONS:
            raise ConfigError(f"orientation must be one of {ORIENTATIONS}, got {self.orientation!r}")
        if self.min_seed_hits < 1:
            raise ConfigError(f"min_seed_hits must be >= 1, got {self.min_seed_hits}")


@dataclass(frozen=True)
class SeedSets:
    positive: frozenset
    negative: frozenset
    conflicts: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "positive", frozenset(self.positive))
        object.__setattr__(self, "negative", frozenset(self.negative))
        object.__setattr__(self, "conflicts", frozenset(self.conflicts))
        if self.positive & self.negative:
            raise DataError(f"seed sets overlap: {sorted(self.positive & self.negative)}")
        spill = self.conflicts & (self.positive | self.negative)
        if spill:
            raise DataError(f"conflict set overlaps seeds: {sorted(spill)}")


def extract_seeds(lexicon: SentiLexicon, threshold: float = 0.5) -> SeedSets:
    """Split out unambiguous entries: one score above threshold, other zero."""
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"seed threshold must be in (0, 1), got {threshold}")
    positive = set()
    negative = set()
    for lemma, entry in lexicon.entries.items():
        if entry.pos_score > threshold and entry.neg_score <= SCORE_EPS:
            positive.add(lemma)
        elif entry.neg_score > threshold and entry.pos_score <= SCORE_EPS:
            negative.add(lemma)
    if not positive and not negative:
        raise NoSeedsError(f"no entries qualify as seeds at threshold {threshold}")
    return SeedSets(frozenset(positive), frozenset(negative))


@dataclass
class ThesaurusGraph:
    """Symmetric synonym/antonym adjacency over lemmas. No self-loops."""

    synonyms: dict = field(default_factory=dict)
    antonyms: dict = field(default_factory=dict)

    def add_synonym(self, a: str, b: str) -> None:
        if a == b:
            raise DataError(f"self-loop on {a!r}")
        self.synonyms.setdefault(a, set()).add(b)
        self.synonyms.setdefault(b, set()).add(a)

    def add_antonym(self, a: str, b: str) -> None:
        if a == b:
            raise DataError(f"self-loop on {a!r}")
        self.antonyms.setdefault(a, set()).add(b)
        self.antonyms.setdefault(b, set()).add(a)

    def synonyms_of(self, lemma: str) -> frozenset:
        return frozenset(self.synonyms.get(lemma, ()))

    def antonyms_of(self, lemma: str) -> frozenset:
        return frozenset(self.antonyms.get(lemma, ()))

    def words(self) -> frozenset:
        return frozenset(self.synonyms) | frozenset(self.antonyms)


def load_thesaurus(path) -> ThesaurusGraph:
    graph = ThesaurusGraph()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split("\t")
            if len(parts) != 3:
                raise ParseError(path, lineno, f"expected 3 tab-separated columns, got {len(parts)}")
            a, b, rel = parts
            if a == b:
                raise ParseError(path, lineno, f"self-loop on {a!r}")
            if rel == "syn":
                graph.add_synonym(a, b)
            elif rel == "ant":
                graph.add_antonym(a, b)
            else:
                raise ParseError(path, lineno, f"relation must be 'syn' or 'ant', got {rel!r}")
    return graph


def load_candidates(path) -> tuple:
    """Candidate file: one lemma per line; blanks and # comments skipped."""
    lemmas = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            stripped = line.strip()
            if stripped and not stripped.startswith("#"):
                lemmas.append(stripped)
    return tuple(lemmas)


def propagate(seeds: SeedSets, graph: ThesaurusGraph, depth: int) -> SeedSets:
    """Grow both polarity sets breadth-first for `depth` rounds.

    The incoming seed words are immutable: never reassigned or quarantined.
    Any other word reached by both polarities (in one round or across rounds)
    moves to the conflict set for good and stops propagating.
    """
    if depth < 0:
        raise ConfigError(f"depth must be >= 0, got {depth}")
    positive = set(seeds.positive)
    negative = set(seeds.negative)
    originals = frozenset(positive | negative)
    conflicts = set(seeds.conflicts)
    frontier_pos = set(positive)
    frontier_neg = set(negative)
    for _ in range(depth):
        reached_pos = set()
        reached_neg = set()
        for word in frontier_pos:
            reached_pos |= graph.synonyms_of(word)
            reached_neg |= graph.antonyms_of(word)
        for word in frontier_neg:
            reached_neg |= graph.synonyms_of(word)
            reached_pos |= graph.antonyms_of(word)
        reached_pos -= originals | conflicts
        reached_neg -= originals | conflicts
        # both polarities at once, or opposite to an earlier assignment
        clash = (reached_pos & reached_neg) | (reached_pos & negative) | (reached_neg & positive)
        conflicts |= clash
        positive -= clash
        negative -= clash
        frontier_pos = reached_pos - clash - positive
        frontier_neg = reached_neg - clash - negative
        positive |= frontier_pos
        negative |= frontier_neg
        if not frontier_pos and not frontier_neg:
            break
    return SeedSets(frozenset(positive), frozenset(negative), frozenset(conflicts))


def polarity_from_distances(d_pos: float, d_neg: float, orientation: str = "proximal"):
    """Normalize a distance pair into complementary polarity scores."""
    if orientation not in ORIENTATIONS:
        raise ConfigError(f"orientation must be one of {ORIENTATIONS}, got {orientation!r}")
    if d_pos < 0 or d_neg < 0:
        raise DataError(f"distances must be >= 0, got ({d_pos}, {d_neg})")
    total = d_pos + d_neg
    if total == 0.0:
        pos = 0.5
    elif orientation == "literal":
        pos = d_pos / total
    else:
        pos = d_neg / total
    return pos, 1.0 - pos


@dataclass(frozen=True)
class ScoreBreakdown:
    lemma: str
    d_pos: float
    d_neg: float
    pos_score: float
    neg_score: float


def score_word(
    word: str,
    seeds: SeedSets,
    table: EmbeddingTable,
    config: ExpansionConfig = ExpansionConfig(),
) -> ScoreBreakdown:
    """Polarity scores for one word from mean distances to both seed sets.

    The word never counts as its own seed. Scores sum to one; equidistant
    words get 0.5 each.
    """
    vector = table.get(word)
    if vector is None:
        raise UnscorableError(f"no embedding for {word!r}")
    means = []
    for label, members in (("positive", seeds.positive), ("negative", seeds.negative)):
        dists = [
            distance(vector, table.vectors[seed], config.metric)
            for seed in sorted(members)
            if seed != word and seed in table.vectors
        ]
        if len(dists) < config.min_seed_hits:
            raise ConfigError(
                f"only {len(dists)} embedded {label} seeds, need >= {config.min_seed_hits}"
            )
        means.append(float(np.mean(dists)))
    d_pos, d_neg = means
    pos, neg = polarity_from_distances(d_pos, d_neg, config.orientation)
    return ScoreBreakdown(lemma=word, d_pos=d_pos, d_neg=d_neg, pos_score=pos, neg_score=neg)


@dataclass(frozen=True)
class ExpansionReport:
    scored: int
    skipped_existing: int
    unscorable: int
    positive: frozenset
    negative: frozenset
    conflicts: frozenset

    def as_text(self) -> str:
        return (
            f"scored={self.scored}\n"
            f"skipped_existing={self.skipped_existing}\n"
            f"unscorable={self.unscorable}\n"
            f"conflicts={len(self.conflicts)}\n"
            f"positive_seeds={len(self.positive)}\n"
            f"negative_seeds={len(self.negative)}\n"
        )


def expand_lexicon(
    lexicon: SentiLexicon,
    graph: ThesaurusGraph,
    table: EmbeddingTable,
    candidates,
    config: ExpansionConfig = ExpansionConfig(),
):
    """Full pipeline: seeds, propagation, candidate scoring, merged lexicon.

    Returns (expanded lexicon, report). Existing entries always win over
    candidates. Candidates without a usable embedding are counted, not fatal;
    a deficient seed configuration is.
    """
    seeds = propagate(extract_seeds(lexicon, config.threshold), graph, config.depth)
    entries = dict(lexicon.entries)
    scored = skipped_existing = unscorable = 0
    seen = set()
    for candidate in candidates:
        if candidate in seen:
            continue
        seen.add(candidate)
        if candidate in entries:
            skipped_existing += 1
            continue
        try:
            breakdown = score_word(candidate, seeds, table, config)
        except (UnscorableError, DistanceError):
            unscorable += 1
            continue
        entries[candidate] = SentiEntry(
            lemma=candidate,
            pos_tag="unknown",
            pos_score=breakdown.pos_score,
            neg_score=breakdown.neg_score,
            gloss="",
            provenance="expanded",
        )
        scored += 1
    merged = SentiLexicon.from_entries(entries.values(), name=lexicon.name)
    report = ExpansionReport(
        scored=scored,
        skipped_existing=skipped_existing,
        unscorable=unscorable,
        positive=seeds.positive,
        negative=seeds.negative,
        conflicts=seeds.conflicts,
    )
    return merged, report
