"""Bilingual word-pair dictionaries and their one-pair-per-line format."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .errors import EmptySeedError, ParseError, ValidationError


@dataclass
class BilingualDictionary:
    """Ordered, multi-valued source-to-target pairs with a provenance tag.

    Duplicate (source, target) pairs are removed on construction, first
    occurrence wins.
    """

    pairs: list[tuple[str, str]]
    provenance: str = "gold"

    def __post_init__(self):
        seen: set[tuple[str, str]] = set()
        unique: list[tuple[str, str]] = []
        for source, target in self.pairs:
            if not source or not target:
                raise ValidationError("dictionary words must be non-empty strings")
            pair = (source, target)
            if pair in seen:
                continue
            seen.add(pair)
            unique.append(pair)
        self.pairs = unique

    def __len__(self) -> int:
        return len(self.pairs)

    def by_source(self) -> dict[str, list[str]]:
        """Targets per source word, preserving pair order."""
        out: dict[str, list[str]] = {}
        for source, target in self.pairs:
            out.setdefault(source, []).append(target)
        return out

    def sources(self) -> list[str]:
        """Unique source words in first-occurrence order."""
        return list(dict.fromkeys(source for source, _ in self.pairs))


def load_dictionary(path: str | os.PathLike, provenance: str = "gold") -> BilingualDictionary:
    """Read "source target" pairs, one per line, whitespace separated."""
    path = os.fspath(path)
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    pairs: list[tuple[str, str]] = []
    with handle:
        for lineno, line in enumerate(handle, start=1):
            tokens = line.split()
            if not tokens:
                continue
            if len(tokens) != 2:
                raise ParseError(
                    f"{path}: line {lineno}: expected 'source target', found {len(tokens)} tokens"
                )
            pairs.append((tokens[0], tokens[1]))
    if not pairs:
        raise EmptySeedError(f"{path}: dictionary file contains no pairs")
    return BilingualDictionary(pairs=pairs, provenance=provenance)


def save_dictionary(dictionary: BilingualDictionary, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as out:
        for source, target in dictionary.pairs:
            out.write(f"{source} {target}\n")
