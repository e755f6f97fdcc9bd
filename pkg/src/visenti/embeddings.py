"""Static word embeddings and precomputed contextual encoder outputs.

Embedding files use the word2vec text format: a ``count dim`` header line
followed by ``lemma v1 ... v_dim`` lines. Encoder outputs (the stand-in for a
contextual language model's per-token vectors) are text matrices: an ``SL h``
header followed by SL rows of h decimals. A directory of such matrices plus a
``manifest.tsv`` mapping sample ids to file names forms an encoder-output
container.
"""

import os
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DistanceError, ParseError, ShapeError
from .ioutil import atomic_write, fmt

METRICS = ("cosine", "euclidean")


@dataclass
class EmbeddingTable:
    """Lemma to vector map with a fixed dimensionality."""

    dim: int
    vectors: dict

    def __post_init__(self):
        if self.dim < 1:
            raise ShapeError(f"embedding dim must be >= 1, got {self.dim}")

    def get(self, lemma):
        return self.vectors.get(lemma)

    def __contains__(self, lemma) -> bool:
        return lemma in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass
class EncoderOutput:
    """SL x h matrix of per-token contextual vectors, row 0 being the
    classification-token row."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.ndim != 2:
            raise ShapeError(f"encoder output must be 2-D, got shape {self.matrix.shape}")

    @property
    def sl(self) -> int:
        return self.matrix.shape[0]

    @property
    def h(self) -> int:
        return self.matrix.shape[1]


def load_embeddings(path) -> EmbeddingTable:
    """Read a word2vec text file.

    A count/line mismatch is a warning, not an error: the table ends up with
    min(header count, available lines) entries. A vector of the wrong width
    is a parse error naming the line.
    """
    vectors = {}
    with open(path, encoding="utf-8") as handle:
        header = handle.readline()
        fields = header.split()
        if len(fields) != 2:
            raise ParseError(path, 1, f"expected 'count dim' header, got {header.strip()!r}")
        try:
            count, dim = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(path, 1, f"non-integer header {header.strip()!r}") from None
        if dim < 1:
            raise ParseError(path, 1, f"dim must be >= 1, got {dim}")
        extra = 0
        for lineno, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            if len(vectors) >= count:
                extra += 1
                continue
            parts = line.split()
            lemma, values = parts[0], parts[1:]
            if len(values) != dim:
                raise ParseError(path, lineno, f"expected {dim} values, got {len(values)}")
            try:
                vectors[lemma] = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise ParseError(path, lineno, "non-numeric vector component") from None
    if len(vectors) != count or extra:
        warnings.warn(
            f"{path}: header declares {count} vectors, file holds {len(vectors) + extra}",
            stacklevel=2,
        )
    return EmbeddingTable(dim=dim, vectors=vectors)


def save_embeddings(table: EmbeddingTable, path) -> None:
    with atomic_write(path) as handle:
        handle.write(f"{len(table.vectors)} {table.dim}\n")
        for lemma in sorted(table.vectors):
            values = " ".join(fmt(v) for v in table.vectors[lemma])
            handle.write(f"{lemma} {values}\n")


def distance(a, b, metric: str = "cosine") -> float:
    """Pointwise distance between two equal-length vectors.

    cosine: 1 - a.b / (|a||b|), in [0, 2]; undefined for a zero vector.
    euclidean: |a - b|.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ShapeError(f"incompatible vector shapes {a.shape} and {b.shape}")
    if metric == "euclidean":
        return float(np.linalg.norm(a - b))
    if metric == "cosine":
        na = np.linalg.norm(a)
        nb = np.linalg.norm(b)
        if na == 0.0 or nb == 0.0:
            raise DistanceError("cosine distance undefined for a zero vector")
        cos = float(np.dot(a, b) / (na * nb))
        cos = min(1.0, max(-1.0, cos))
        return 1.0 - cos
    raise ConfigError(f"unknown metric {metric!r}")


def load_encoder_output(path) -> EncoderOutput:
    """Read one SL x h text matrix, failing on any row/column count mismatch."""
    with open(path, encoding="utf-8") as handle:
        header = handle.readline()
        fields = header.split()
        if len(fields) != 2:
            raise ParseError(path, 1, f"expected 'SL h' header, got {header.strip()!r}")
        try:
            sl, h = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(path, 1, f"non-integer header {header.strip()!r}") from None
        if sl < 1 or h < 1:
            raise ParseError(path, 1, f"SL and h must be >= 1, got {sl} x {h}")
        rows = []
        for lineno, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            if len(rows) >= sl:
                raise ParseError(path, lineno, f"more than the declared {sl} rows")
            values = line.split()
            if len(values) != h:
                raise ParseError(path, lineno, f"expected {h} columns, got {len(values)}")
            try:
                rows.append([float(v) for v in values])
            except ValueError:
                raise ParseError(path, lineno, "non-numeric matrix entry") from None
    if len(rows) != sl:
        raise ParseError(path, None, f"declared {sl} rows, found {len(rows)}")
    return EncoderOutput(np.array(rows, dtype=np.float64))


def save_encoder_output(enc: EncoderOutput, path) -> None:
    with atomic_write(path) as handle:
        handle.write(f"{enc.sl} {enc.h}\n")
        for row in enc.matrix:
            handle.write(" ".join(fmt(v) for v in row) + "\n")


def encode_static(tokens, table: EmbeddingTable, sl: int) -> EncoderOutput:
    """Fallback encoder: zero classification row, then one static vector per
    token, zero rows for unknown tokens, padded or truncated to SL rows."""
    if sl < 1:
        raise ConfigError(f"SL must be >= 1, got {sl}")
    matrix = np.zeros((sl, table.dim), dtype=np.float64)
    for position, token in enumerate(tokens, start=1):
        if position >= sl:
            break
        vector = table.vectors.get(token)
        if vector is not None:
            matrix[position] = vector
    return EncoderOutput(matrix)


def save_encoder_outputs(directory, items) -> None:
    """Write an encoder-output container: one .mat file per sample plus a
    manifest.tsv mapping sample ids to file names."""
    os.makedirs(directory, exist_ok=True)
    items = dict(items)
    with atomic_write(os.path.join(directory, "manifest.tsv")) as manifest:
        for sample_id in items:
            filename = f"{sample_id}.mat"
            manifest.write(f"{sample_id}\t{filename}\n")
            save_encoder_output(items[sample_id], os.path.join(directory, filename))


def load_encoder_outputs(directory) -> dict:
    manifest_path = os.path.join(directory, "manifest.tsv")
    if not os.path.exists(manifest_path):
        raise ParseError(manifest_path, None, "missing manifest.tsv")
    outputs = {}
    with open(manifest_path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise ParseError(manifest_path, lineno, "expected 'id<TAB>filename'")
            sample_id, filename = parts
            outputs[sample_id] = load_encoder_output(os.path.join(directory, filename))
    return outputs
