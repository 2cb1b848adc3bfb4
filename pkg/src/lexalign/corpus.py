"""Term distributions over tokenized corpora and domain similarity.

Domain similarity is ``1 - JS`` where JS is the Jensen-Shannon
divergence with base-2 logarithms, so both values live in [0, 1].
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .dictionaries import BilingualDictionary
from .errors import ParseError, ValidationError


@dataclass
class TermDistribution:
    """Relative word frequencies; probabilities sum to 1."""

    words: list[str]
    probabilities: np.ndarray

    def __post_init__(self):
        self.probabilities = np.asarray(self.probabilities, dtype=np.float64)
        if len(self.words) != len(self.probabilities):
            raise ValidationError("words and probabilities differ in length")
        if (self.probabilities < 0).any():
            raise ValidationError("probabilities must be non-negative")
        if abs(float(self.probabilities.sum()) - 1.0) > 1e-9:
            raise ValidationError("probabilities must sum to 1")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.words, self.probabilities.tolist()))


def translate_tokens(
    tokens: Iterable[str], dictionary: BilingualDictionary
) -> tuple[list[str], int]:
    """Map each token to its first-listed translation; drop the rest.

    Returns the translated tokens and the number dropped for having no
    dictionary entry.
    """
    first_translation = {s: ts[0] for s, ts in dictionary.by_source().items()}
    translated: list[str] = []
    dropped = 0
    for token in tokens:
        mapped = first_translation.get(token)
        if mapped is None:
            dropped += 1
        else:
            translated.append(mapped)
    return translated, dropped


def term_distribution(
    tokens: Iterable[str], vocab_cap: int | None = None
) -> TermDistribution:
    """Relative frequencies of the observed words.

    With ``vocab_cap`` only the most frequent words are kept (count
    ties break alphabetically) and the probabilities are renormalized.
    """
    if vocab_cap is not None and vocab_cap < 1:
        raise ValidationError("vocab_cap must be at least 1")
    counts = Counter(tokens)
    if not counts:
        raise ParseError("empty token stream: cannot build a term distribution")
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    if vocab_cap is not None:
        ranked = ranked[:vocab_cap]
    total = sum(count for _, count in ranked)
    words = [word for word, _ in ranked]
    probs = np.asarray([count / total for _, count in ranked])
    return TermDistribution(words=words, probabilities=probs)


def _kl_base2(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    return float((p[mask] * np.log2(p[mask] / q[mask])).sum())


def domain_similarity(p: TermDistribution, q: TermDistribution) -> tuple[float, float]:
    """(js, dsim) between two term distributions.

    Supports are unioned with missing words at probability zero;
    ``0 * log 0`` terms are treated as zero.  JS is bounded in [0, 1]
    by the base-2 logarithm and dsim = 1 - JS.
    """
    vocabulary = list(dict.fromkeys(p.words + q.words))
    index = {word: i for i, word in enumerate(vocabulary)}
    pv = np.zeros(len(vocabulary))
    qv = np.zeros(len(vocabulary))
    for word, prob in zip(p.words, p.probabilities):
        pv[index[word]] = prob
    for word, prob in zip(q.words, q.probabilities):
        qv[index[word]] = prob
    mid = 0.5 * (pv + qv)
    js = 0.5 * _kl_base2(pv, mid) + 0.5 * _kl_base2(qv, mid)
    js = min(max(js, 0.0), 1.0)
    return js, 1.0 - js
