"""Cross-lingual retrieval and precision-at-1 evaluation.

Scores mapped source vectors against a target vocabulary with plain
cosine or with CSLS (``2*cos(x, y) - mnn_T(x) - mnn_S(y)``), which
discounts hub candidates by the mean similarity of each vector to its K
nearest neighbors in the opposite space.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .dictionaries import BilingualDictionary
from .embeddings import EmbeddingSpace, ensure_normalized
from .errors import NoEvaluableQueriesError, ParseError, ValidationError

if TYPE_CHECKING:
    from .mapping import TranslationMatrix

DEFAULT_CSLS_K = 10

FREQUENCY_BINS = ((1, 100), (101, 1000), (1001, 10000))

HOMOGRAPH_NOTE = (
    "homograph classes are a proxy: same-same means the query is one of its "
    "gold translations, same-diff means the query's spelling exists in the "
    "target vocabulary without being a gold translation"
)


@dataclass(frozen=True)
class RetrievalConfig:
    """How to score candidates: method, CSLS neighborhood, vocab cap."""

    method: str = "csls"
    csls_k: int = DEFAULT_CSLS_K
    candidates: int | None = None

    def __post_init__(self):
        if self.method not in ("cosine", "csls"):
            raise ValidationError(f"unknown retrieval method {self.method!r}")
        if self.csls_k < 1:
            raise ValidationError("csls_k must be at least 1")
        if self.candidates is not None and self.candidates < 1:
            raise ValidationError("candidates cap must be at least 1")


def csls_score(cos_xy: float, mnn_x: float, mnn_y: float) -> float:
    """CSLS value for one pair given its two mean-neighborhood terms."""
    return 2.0 * cos_xy - mnn_x - mnn_y


def mean_nn_similarity(x, space: EmbeddingSpace, k: int) -> float:
    """Mean cosine of ``x`` to its k most similar vectors in ``space``."""
    ensure_normalized(space)
    if not 1 <= k < len(space):
        raise ValidationError(
            f"neighborhood size k={k} must be in [1, {len(space) - 1}]"
        )
    cos = space.vectors @ np.asarray(x, dtype=np.float64)
    return float(np.partition(cos, -k)[-k:].mean())


def _mean_topk(matrix: np.ndarray, k: int, axis: int) -> np.ndarray:
    part = np.partition(matrix, -k, axis=axis)
    if axis == 1:
        return part[:, -k:].mean(axis=1)
    return part[-k:, :].mean(axis=0)


def score_matrix(
    mapped_sources: np.ndarray, targets: np.ndarray, cfg: RetrievalConfig
) -> np.ndarray:
    """Retrieval scores for every (mapped source row, target row) pair.

    For CSLS the neighborhood terms are computed within the two full
    vector sets passed in, so callers should pass whole (capped)
    vocabularies rather than just the queries of interest.
    """
    cos = mapped_sources @ targets.T
    if cfg.method == "cosine":
        return cos
    k = cfg.csls_k
    if k >= targets.shape[0] or k >= mapped_sources.shape[0]:
        raise ValidationError(
            f"csls_k={k} must be smaller than both vocabularies "
            f"({mapped_sources.shape[0]} source, {targets.shape[0]} target)"
        )
    mnn_src = _mean_topk(cos, k, axis=1)
    mnn_tgt = _mean_topk(cos, k, axis=0)
    return 2.0 * cos - mnn_src[:, None] - mnn_tgt[None, :]


@dataclass(frozen=True)
class Prediction:
    query: str
    target: str
    score: float


@dataclass
class TranslationResult:
    predictions: list[Prediction]
    skipped_oov: list[str]


def translate(
    queries: list[str],
    src: EmbeddingSpace,
    tgt: EmbeddingSpace,
    w: "TranslationMatrix",
    cfg: RetrievalConfig | None = None,
) -> TranslationResult:
    """Map queries with ``x @ w.T`` and retrieve the best target word each.

    Out-of-vocabulary queries are skipped and reported; score ties break
    toward the more frequent target word.
    """
    cfg = cfg or RetrievalConfig()
    ensure_normalized(src, "source space")
    ensure_normalized(tgt, "target space")
    if w.dim != src.dim or w.dim != tgt.dim:
        raise ValidationError(
            f"translation matrix dimension {w.dim} does not match spaces "
            f"({src.dim}, {tgt.dim})"
        )
    in_vocab = [q for q in queries if q in src]
    skipped = [q for q in queries if q not in src]
    if not in_vocab:
        raise NoEvaluableQueriesError("all queries are out of vocabulary")

    targets = tgt.vectors[: cfg.candidates] if cfg.candidates else tgt.vectors
    query_rows = np.asarray([src.position(q) for q in in_vocab])
    if cfg.method == "cosine":
        scores = src.vectors[query_rows] @ w.w.T @ targets.T
    else:
        mapped_full = src.vectors @ w.w.T
        scores = score_matrix(mapped_full, targets, cfg)[query_rows]

    best = np.argmax(scores, axis=1)  # first max wins: most frequent target
    predictions = [
        Prediction(query=q, target=tgt.words[int(j)], score=float(scores[i, int(j)]))
        for i, (q, j) in enumerate(zip(in_vocab, best))
    ]
    return TranslationResult(predictions=predictions, skipped_oov=skipped)


@dataclass(frozen=True)
class GroupScore:
    count: int
    p_at_1: float


@dataclass
class EvalReport:
    """Overall P@1 plus named per-group breakdowns."""

    p_at_1: float
    evaluated: int
    skipped_oov: int = 0
    skipped_no_gold: int = 0
    groups: dict[str, dict[str, GroupScore]] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)


def _judged(predictions: list[Prediction], gold: BilingualDictionary):
    """(prediction, correct) for every query present in gold."""
    if not len(gold):
        raise ValidationError("gold dictionary is empty")
    gold_map = {s: set(ts) for s, ts in gold.by_source().items()}
    judged = []
    skipped_no_gold = 0
    for pred in predictions:
        targets = gold_map.get(pred.query)
        if targets is None:
            skipped_no_gold += 1
            continue
        judged.append((pred, pred.target in targets))
    if not judged:
        raise NoEvaluableQueriesError("no query has a gold entry to evaluate against")
    return judged, skipped_no_gold


def evaluate_p1(predictions: list[Prediction], gold: BilingualDictionary) -> EvalReport:
    """Fraction of queries whose prediction is among their gold targets.

    A prediction counts as correct when it matches any of the query's
    gold translations; queries without a gold entry are excluded and
    counted separately.
    """
    judged, skipped_no_gold = _judged(predictions, gold)
    correct = sum(1 for _, ok in judged if ok)
    return EvalReport(
        p_at_1=correct / len(judged),
        evaluated=len(judged),
        skipped_no_gold=skipped_no_gold,
    )


def frequency_bin(rank: int) -> str:
    for low, high in FREQUENCY_BINS:
        if low <= rank <= high:
            return f"{low}-{high}"
    return f"{FREQUENCY_BINS[-1][1] + 1}+"


def homograph_class(query: str, gold_targets: set[str], tgt: EmbeddingSpace) -> str:
    if query in gold_targets:
        return "same-same"
    if query in tgt:
        return "same-diff"
    return "diff-diff"


def breakdown_report(
    predictions: list[Prediction],
    gold: BilingualDictionary,
    src: EmbeddingSpace,
    tgt: EmbeddingSpace,
    word_class_map: dict[str, str] | None = None,
) -> EvalReport:
    """EvalReport with frequency-bin, homograph, and word-class groups.

    Frequency groups bin queries by source rank (1-100, 101-1000,
    1001-10000, 10001+); homograph groups follow the spelling/meaning
    proxy described in the report notes; word-class groups appear when a
    word -> label map is supplied, with unlabeled words under "other".
    """
    judged, skipped_no_gold = _judged(predictions, gold)
    gold_map = {s: set(ts) for s, ts in gold.by_source().items()}

    tallies: dict[str, dict[str, list[int]]] = {"frequency": {}, "homograph": {}}
    if word_class_map is not None:
        tallies["word_class"] = {}

    correct_total = 0
    for pred, ok in judged:
        correct_total += ok
        rank = src.frequency_rank(pred.query)
        labels = {
            "frequency": frequency_bin(rank),
            "homograph": homograph_class(pred.query, gold_map[pred.query], tgt),
        }
        if word_class_map is not None:
            labels["word_class"] = word_class_map.get(pred.query, "other")
        for family, label in labels.items():
            counts = tallies[family].setdefault(label, [0, 0])
            counts[0] += 1
            counts[1] += ok

    groups = {
        family: {
            label: GroupScore(count=c, p_at_1=k / c)
            for label, (c, k) in sorted(members.items())
        }
        for family, members in tallies.items()
    }
    return EvalReport(
        p_at_1=correct_total / len(judged),
        evaluated=len(judged),
        skipped_no_gold=skipped_no_gold,
        groups=groups,
        notes={"homograph_classes": HOMOGRAPH_NOTE},
    )


def load_word_class_map(path: str | os.PathLike) -> dict[str, str]:
    """Read a "word<TAB>label" file into a dict (first entry wins)."""
    path = os.fspath(path)
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    mapping: dict[str, str] = {}
    with handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ParseError(f"{path}: line {lineno}: expected 'word<TAB>label'")
            mapping.setdefault(parts[0], parts[1])
    return mapping
