"""Sentiment lexicon data model and file I/O.

The on-disk format follows the public SentiWordNet releases: UTF-8, LF line
endings, tab-separated, six columns

    POS <tab> ID <tab> PosScore <tab> NegScore <tab> SynsetTerms <tab> Gloss

where ``SynsetTerms`` is a space-separated list of ``lemma#senseNo`` items and
lines starting with ``#`` are comments. POS column letters: n, v, a, r map to
noun, verb, adjective, adverb; anything else is ``unknown``. Multiword lemmas
join their tokens with ``_`` (the segmented-corpus convention).

Two pieces of state have no column of their own and are carried losslessly:

* the lexicon name lives in a ``# lexicon: <name>`` header comment,
* entry provenance lives in the otherwise unused ID column (``x``-prefixed
  IDs mark expanded entries, anything else means the entry came from a seed
  file).
"""

from dataclasses import dataclass, field

from .errors import DataError, ParseError
from .ioutil import atomic_write, fmt

POS_TAGS = ("noun", "verb", "adjective", "adverb", "unknown")
PROVENANCES = ("seed_file", "expanded")

_LETTER_TO_POS = {"n": "noun", "v": "verb", "a": "adjective", "r": "adverb"}
_POS_TO_LETTER = {"noun": "n", "verb": "v", "adjective": "a", "adverb": "r", "unknown": "u"}

_NAME_PREFIX = "# lexicon: "


@dataclass
class SentiEntry:
    """One lemma with its polarity scores.

    Expanded entries are constructed so that pos_score + neg_score = 1;
    seed-file entries may carry any pair of scores in [0, 1].
    """

    lemma: str
    pos_tag: str = "unknown"
    pos_score: float = 0.0
    neg_score: float = 0.0
    gloss: str = ""
    provenance: str = "seed_file"

    def __post_init__(self):
        if self.pos_tag not in POS_TAGS:
            raise DataError(f"unknown pos tag {self.pos_tag!r}")
        if self.provenance not in PROVENANCES:
            raise DataError(f"unknown provenance {self.provenance!r}")
        for score in (self.pos_score, self.neg_score):
            if not 0.0 <= score <= 1.0:
                raise DataError(f"score {score!r} outside [0, 1] for {self.lemma!r}")
        if self.provenance == "expanded":
            if abs(self.pos_score + self.neg_score - 1.0) > 1e-9:
                raise DataError(
                    f"expanded entry {self.lemma!r} scores do not sum to 1: "
                    f"{self.pos_score!r} + {self.neg_score!r}"
                )

    @property
    def polarity_strength(self) -> float:
        return abs(self.pos_score - self.neg_score)


@dataclass
class SentiLexicon:
    """Immutable-by-convention map from lemma to entry."""

    entries: dict = field(default_factory=dict)
    name: str = "lexicon"

    @classmethod
    def from_entries(cls, entries, name="lexicon") -> "SentiLexicon":
        table = {}
        for entry in entries:
            if entry.lemma in table:
                raise DataError(f"duplicate lemma {entry.lemma!r}")
            table[entry.lemma] = entry
        return cls(entries=table, name=name)

    @property
    def max_phrase_len(self) -> int:
        if not self.entries:
            return 1
        return max(lemma.count("_") + 1 for lemma in self.entries)

    def get(self, lemma):
        return self.entries.get(lemma)

    def __contains__(self, lemma) -> bool:
        return lemma in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def _strip_sense(term: str) -> str:
    head, sep, tail = term.rpartition("#")
    if sep and tail.isdigit():
        return head
    return term


def _parse_score(raw: str, path, lineno: int, column: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ParseError(path, lineno, f"{column} {raw!r} is not a number") from None
    if not 0.0 <= value <= 1.0:
        raise ParseError(path, lineno, f"{column} {raw!r} outside [0, 1]")
    return value


def load_lexicon(path) -> "SentiLexicon":
    """Parse a lexicon file; one entry per distinct lemma.

    Sense suffixes (``#3``) are stripped. When a lemma occurs more than once
    the most polarized occurrence (largest |pos - neg|) wins, ties going to
    the first occurrence. An empty file yields an empty lexicon.
    """
    name = None
    entries = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if line.startswith("#"):
                if name is None and line.startswith(_NAME_PREFIX):
                    name = line[len(_NAME_PREFIX):]
                continue
            if not line.strip():
                continue
            parts = line.split("\t", 5)
            if len(parts) < 5:
                raise ParseError(path, lineno, f"expected >= 5 tab-separated columns, got {len(parts)}")
            pos_letter, entry_id, raw_pos, raw_neg, terms = parts[:5]
            gloss = parts[5] if len(parts) > 5 else ""
            pos_score = _parse_score(raw_pos, path, lineno, "PosScore")
            neg_score = _parse_score(raw_neg, path, lineno, "NegScore")
            pos_tag = _LETTER_TO_POS.get(pos_letter, "unknown")
            provenance = "expanded" if entry_id.startswith("x") else "seed_file"
            for term in terms.split(" "):
                if not term:
                    continue
                lemma = _strip_sense(term)
                entry = SentiEntry(
                    lemma=lemma,
                    pos_tag=pos_tag,
                    pos_score=pos_score,
                    neg_score=neg_score,
                    gloss=gloss,
                    provenance=provenance,
                )
                kept = entries.get(lemma)
                if kept is None or entry.polarity_strength > kept.polarity_strength:
                    entries[lemma] = entry
    if name is None:
        import os
        name = os.path.splitext(os.path.basename(os.fspath(path)))[0]
    return SentiLexicon(entries=entries, name=name)


def save_lexicon(lexicon: SentiLexicon, path) -> None:
    """Write a lexicon so that load_lexicon() restores it field-by-field.

    Entries are sorted by lemma; scores use shortest round-trip decimals.
    """
    with atomic_write(path) as handle:
        handle.write(_NAME_PREFIX + lexicon.name + "\n")
        handle.write("# POS\tID\tPosScore\tNegScore\tSynsetTerms\tGloss\n")
        for index, lemma in enumerate(sorted(lexicon.entries), start=1):
            entry = lexicon.entries[lemma]
            prefix = "x" if entry.provenance == "expanded" else "s"
            handle.write(
                "\t".join(
                    (
                        _POS_TO_LETTER[entry.pos_tag],
                        f"{prefix}{index:06d}",
                        fmt(entry.pos_score),
                        fmt(entry.neg_score),
                        f"{entry.lemma}#1",
                        entry.gloss,
                    )
                )
                + "\n"
            )


def lookup_longest(lexicon: SentiLexicon, tokens, start: int):
    """Longest lemma match starting at `start`, as (entry, span_length).

    Token runs are joined with "_" before lookup; returns None when no run
    of 1..max_phrase_len tokens is in the lexicon.
    """
    if not 0 <= start < len(tokens):
        raise IndexError(f"start {start} out of range for {len(tokens)} tokens")
    longest = min(lexicon.max_phrase_len, len(tokens) - start)
    for span in range(longest, 0, -1):
        lemma = "_".join(tokens[start:start + span])
        entry = lexicon.entries.get(lemma)
        if entry is not None:
            return entry, span
    return None
