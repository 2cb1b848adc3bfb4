"""Loading, validation, and normalization of .vec embedding files.

The .vec text format is an optional ``<count> <dim>`` header line
followed by one ``<word> <v1> ... <vd>`` line per word, most frequent
word first.  File order therefore doubles as the frequency rank.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .errors import ParseError, ValidationError

ZERO_NORM_TOL = 1e-12


@dataclass
class EmbeddingSpace:
    """Vocabulary with row-aligned vectors, most frequent word first.

    Treated as immutable once constructed; operations that change the
    vectors (normalization) return a new space.
    """

    words: list[str]
    vectors: np.ndarray
    normalized: bool = False
    duplicates_dropped: int = 0
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.words):
            raise ValidationError(
                f"vector matrix of shape {self.vectors.shape} does not match "
                f"{len(self.words)} words"
            )
        if self.vectors.size and not np.isfinite(self.vectors).all():
            raise ValidationError("embedding vectors contain non-finite values")
        self._index = {}
        for i, word in enumerate(self.words):
            if word in self._index:
                raise ValidationError(f"duplicate word {word!r}")
            self._index[word] = i

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def position(self, word: str) -> int | None:
        """Zero-based row of ``word``, or None when out of vocabulary."""
        return self._index.get(word)

    def frequency_rank(self, word: str) -> int | None:
        """One-based frequency rank (load order), or None when OOV."""
        i = self._index.get(word)
        return None if i is None else i + 1

    def vector(self, word: str) -> np.ndarray:
        i = self._index.get(word)
        if i is None:
            raise ValidationError(f"word {word!r} is not in the vocabulary")
        return self.vectors[i]


def load_vec(
    source: str | os.PathLike | IO[str] | Iterable[str],
    max_vocab: int | None = None,
    expect_header: bool = True,
    fold_case: bool = False,
) -> EmbeddingSpace:
    """Parse a .vec file path or text stream into an EmbeddingSpace.

    Duplicate words keep their first (most frequent) row; the number of
    dropped rows is recorded on the returned space.  With ``fold_case``
    words are lowercased before the duplicate check.
    """
    if max_vocab is not None and max_vocab < 1:
        raise ValidationError("max_vocab must be at least 1")
    if isinstance(source, (str, os.PathLike)):
        path = os.fspath(source)
        try:
            handle = open(path, "r", encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc}") from exc
        with handle:
            return _parse_vec(handle, max_vocab, expect_header, fold_case, path)
    return _parse_vec(source, max_vocab, expect_header, fold_case, "<stream>")


def _parse_vec(lines, max_vocab, expect_header, fold_case, origin):
    words: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    duplicates = 0
    dim: int | None = None

    for lineno, line in enumerate(lines, start=1):
        tokens = line.split()
        if lineno == 1 and expect_header:
            if len(tokens) != 2 or not all(t.isdigit() for t in tokens):
                raise ParseError(f"{origin}: line 1: expected '<count> <dim>' header")
            dim = int(tokens[1])
            if dim < 1:
                raise ParseError(f"{origin}: line 1: dimension must be positive")
            continue
        if not tokens:
            continue
        word = tokens[0].lower() if fold_case else tokens[0]
        arity = len(tokens) - 1
        if dim is None:
            if arity < 1:
                raise ParseError(f"{origin}: line {lineno}: no vector values for {word!r}")
            dim = arity
        if arity != dim:
            raise ParseError(
                f"{origin}: line {lineno}: expected {dim} values for {word!r}, found {arity}"
            )
        if word in seen:
            duplicates += 1
            continue
        try:
            values = [float(t) for t in tokens[1:]]
        except ValueError as exc:
            raise ParseError(f"{origin}: line {lineno}: {exc}") from exc
        if not all(np.isfinite(values)):
            raise ParseError(f"{origin}: line {lineno}: non-finite value for {word!r}")
        seen.add(word)
        words.append(word)
        rows.append(values)
        if max_vocab is not None and len(words) >= max_vocab:
            break

    if not words:
        raise ParseError(f"{origin}: no embedding rows found")
    return EmbeddingSpace(
        words=words,
        vectors=np.asarray(rows, dtype=np.float64),
        duplicates_dropped=duplicates,
    )


def save_vec(space: EmbeddingSpace, path: str | os.PathLike) -> None:
    """Write a space as .vec text with a ``<count> <dim>`` header."""
    with open(path, "w", encoding="utf-8") as out:
        out.write(f"{len(space.words)} {space.dim}\n")
        for word, row in zip(space.words, space.vectors):
            out.write(word + " " + " ".join(repr(float(v)) for v in row) + "\n")


def normalize(space: EmbeddingSpace) -> EmbeddingSpace:
    """Return a copy of the space with unit L2 rows, same word order."""
    norms = np.linalg.norm(space.vectors, axis=1)
    zero = np.flatnonzero(norms < ZERO_NORM_TOL)
    if zero.size:
        word = space.words[int(zero[0])]
        raise ValidationError(f"cannot normalize zero-norm vector for word {word!r}")
    return EmbeddingSpace(
        words=list(space.words),
        vectors=space.vectors / norms[:, None],
        normalized=True,
        duplicates_dropped=space.duplicates_dropped,
    )


def ensure_normalized(space: EmbeddingSpace, name: str = "space") -> None:
    """Reject spaces whose rows are not unit length within 1e-6."""
    if space.normalized:
        return
    if not len(space):
        raise ValidationError(f"{name} is empty")
    norms = np.linalg.norm(space.vectors, axis=1)
    if np.abs(norms - 1.0).max() > 1e-6:
        raise ValidationError(f"{name} is not unit-normalized; call normalize() first")
