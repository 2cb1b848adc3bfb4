"""Translation-matrix estimation between two embedding spaces.

Covers identical-word seeding, the closed-form orthogonal Procrustes
fit, iterative mutual-nearest-neighbor refinement, and an adversarial
initializer for the unsupervised setting.

Convention used throughout the toolkit: vectors are rows, and a source
row ``x`` maps into the target space as ``x @ w.T``.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .dictionaries import BilingualDictionary
from .embeddings import EmbeddingSpace, ensure_normalized
from .errors import (
    EmptySeedError,
    ParseError,
    TrainingDivergenceError,
    ValidationError,
)
from .retrieval import RetrievalConfig, score_matrix

PROCRUSTES_ORTHOGONALITY_TOL = 1e-6


@dataclass(frozen=True)
class TranslationMatrix:
    """Square source-to-target map with its orthogonality residual."""

    w: np.ndarray
    orthogonality_residual: float

    @classmethod
    def from_matrix(cls, w) -> "TranslationMatrix":
        arr = linalg.as_matrix(w, "translation matrix")
        if arr.shape[0] != arr.shape[1]:
            raise ValidationError(f"translation matrix must be square, got {arr.shape}")
        return cls(w=arr, orthogonality_residual=linalg.orthogonality_residual(arr))

    @classmethod
    def identity(cls, dim: int) -> "TranslationMatrix":
        return cls(w=np.eye(dim), orthogonality_residual=0.0)

    @property
    def dim(self) -> int:
        return self.w.shape[0]

    def apply(self, vectors) -> np.ndarray:
        return np.asarray(vectors, dtype=np.float64) @ self.w.T


def save_matrix(matrix: TranslationMatrix, path: str | os.PathLike) -> None:
    """Persist as numeric text with a "d d" header, one row per line."""
    with open(path, "w", encoding="utf-8") as out:
        out.write(f"{matrix.dim} {matrix.dim}\n")
        for row in matrix.w:
            out.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_matrix(path: str | os.PathLike) -> TranslationMatrix:
    path = os.fspath(path)
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    with handle:
        lines = [line.split() for line in handle if line.strip()]
    if not lines or len(lines[0]) != 2:
        raise ParseError(f"{path}: expected a 'd d' header line")
    try:
        rows, cols = int(lines[0][0]), int(lines[0][1])
        values = [[float(v) for v in line] for line in lines[1:]]
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if len(values) != rows or any(len(r) != cols for r in values):
        raise ParseError(f"{path}: matrix body does not match the {rows}x{cols} header")
    return TranslationMatrix.from_matrix(np.asarray(values))


def identical_seed(src: EmbeddingSpace, tgt: EmbeddingSpace) -> BilingualDictionary:
    """Seed pairs (w, w) from byte-identical words in both vocabularies."""
    shared = [w for w in src.words if w in tgt]  # source order = frequency rank
    if not shared:
        raise EmptySeedError("the vocabularies share no identically spelled words")
    return BilingualDictionary(
        pairs=[(w, w) for w in shared], provenance="identical-seed"
    )


@dataclass(frozen=True)
class ProcrustesResult:
    matrix: TranslationMatrix
    pairs_used: int
    pairs_dropped: int


def procrustes(
    src: EmbeddingSpace, tgt: EmbeddingSpace, dictionary: BilingualDictionary
) -> ProcrustesResult:
    """Closed-form best orthogonal map from dictionary pairs.

    Stacks the surviving pairs' vectors into S and T and takes
    ``W = U @ V.T`` from the SVD of ``T.T @ S``, which minimizes
    ``||S @ W.T - T||_F`` over orthogonal W.  Pairs with an
    out-of-vocabulary side are dropped and counted.
    """
    ensure_normalized(src, "source space")
    ensure_normalized(tgt, "target space")
    if src.dim != tgt.dim:
        raise ValidationError(f"dimension mismatch: {src.dim} vs {tgt.dim}")
    rows_s, rows_t = [], []
    dropped = 0
    for source, target in dictionary.pairs:
        si = src.position(source)
        ti = tgt.position(target)
        if si is None or ti is None:
            dropped += 1
            continue
        rows_s.append(src.vectors[si])
        rows_t.append(tgt.vectors[ti])
    if not rows_s:
        raise EmptySeedError(
            f"no dictionary pair exists in both vocabularies ({dropped} dropped)"
        )
    if len(rows_s) < src.dim:
        warnings.warn(
            f"only {len(rows_s)} seed pairs for dimension {src.dim}: "
            "the Procrustes fit is rank-deficient",
            RuntimeWarning,
            stacklevel=2,
        )
    s = np.asarray(rows_s)
    t = np.asarray(rows_t)
    res = linalg.svd(t.T @ s)
    matrix = TranslationMatrix.from_matrix(res.u @ res.v.T)
    if matrix.orthogonality_residual >= PROCRUSTES_ORTHOGONALITY_TOL:
        raise ValidationError(
            f"Procrustes produced a non-orthogonal matrix "
            f"(residual {matrix.orthogonality_residual:.3g})"
        )
    return ProcrustesResult(
        matrix=matrix, pairs_used=len(rows_s), pairs_dropped=dropped
    )


def mutual_nn_dictionary(
    src: EmbeddingSpace,
    tgt: EmbeddingSpace,
    w: TranslationMatrix,
    top_frequent: int = 10000,
    cfg: RetrievalConfig | None = None,
) -> BilingualDictionary:
    """Bidirectionally consistent translations of frequent source words.

    For each of the ``top_frequent`` most frequent source words the best
    target under the retrieval score is found; the pair is kept only
    when the reverse retrieval from that target lands back on the source
    word.  ``top_frequent`` silently caps at the vocabulary size.
    """
    cfg = cfg or RetrievalConfig()
    ensure_normalized(src, "source space")
    ensure_normalized(tgt, "target space")
    if top_frequent < 1:
        raise ValidationError("top_frequent must be at least 1")
    if w.dim != src.dim or w.dim != tgt.dim:
        raise ValidationError("translation matrix dimension does not match the spaces")
    m = min(top_frequent, len(src))
    mapped = src.vectors @ w.w.T
    targets = tgt.vectors[: cfg.candidates] if cfg.candidates else tgt.vectors
    scores = score_matrix(mapped, targets, cfg)
    forward = np.argmax(scores[:m], axis=1)
    reverse = np.argmax(scores[:, forward], axis=0)
    keep = np.flatnonzero(reverse == np.arange(m))
    pairs = [(src.words[int(i)], tgt.words[int(forward[i])]) for i in keep]
    if not pairs:
        raise EmptySeedError("mutual nearest-neighbor pruning kept no pairs")
    return BilingualDictionary(pairs=pairs, provenance="mutual-nn")


@dataclass
class RefineResult:
    matrix: TranslationMatrix
    dictionary_sizes: list[int]


def refine(
    src: EmbeddingSpace,
    tgt: EmbeddingSpace,
    w0: TranslationMatrix,
    iterations: int = 5,
    top_frequent: int = 10000,
    cfg: RetrievalConfig | None = None,
) -> RefineResult:
    """Alternate mutual-NN dictionary induction and Procrustes re-fitting.

    Each iteration re-seeds from scratch with the current matrix; with
    ``iterations=0`` the input matrix is returned unchanged.
    """
    if iterations < 0:
        raise ValidationError("iterations must be non-negative")
    w = w0
    sizes: list[int] = []
    for iteration in range(iterations):
        try:
            induced = mutual_nn_dictionary(src, tgt, w, top_frequent, cfg)
        except EmptySeedError as exc:
            raise EmptySeedError(f"refinement iteration {iteration + 1}: {exc}") from exc
        sizes.append(len(induced))
        w = procrustes(src, tgt, induced).matrix
    return RefineResult(matrix=w, dictionary_sizes=sizes)


@dataclass(frozen=True)
class AdversarialConfig:
    """Training knobs for the adversarial initializer.

    The learning rates decay multiplicatively per epoch once past
    ``lr_hold_epochs``; ``generator_momentum`` is classical SGD momentum
    on the mapping update.
    """

    epochs: int = 50
    batch_size: int = 64
    discriminator_hidden_units: int = 256
    discriminator_lr: float = 0.1
    generator_lr: float = 0.05
    lr_decay: float = 0.98
    lr_hold_epochs: int = 0
    generator_momentum: float = 0.0
    label_smoothing: float = 0.1
    vocab_cap: int = 5000
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise ValidationError("epochs must be non-negative")
        if min(self.batch_size, self.discriminator_hidden_units, self.vocab_cap) < 1:
            raise ValidationError("counts must be positive")
        if self.discriminator_lr <= 0 or self.generator_lr <= 0:
            raise ValidationError("learning rates must be positive")
        if not 0 < self.lr_decay <= 1:
            raise ValidationError("lr_decay must be in (0, 1]")
        if self.lr_hold_epochs < 0:
            raise ValidationError("lr_hold_epochs must be non-negative")
        if not 0 <= self.generator_momentum < 1:
            raise ValidationError("generator_momentum must be in [0, 1)")
        if not 0 <= self.label_smoothing < 0.5:
            raise ValidationError("label_smoothing must be in [0, 0.5)")


@dataclass(frozen=True)
class EpochTrace:
    epoch: int
    discriminator_accuracy: float
    discriminator_loss: float
    generator_loss: float
    orthogonality_residual: float


@dataclass
class AdversarialResult:
    matrix: TranslationMatrix
    trace: list[EpochTrace]


def _leaky_relu(z: np.ndarray) -> np.ndarray:
    return np.where(z > 0, z, 0.2 * z)


def _leaky_relu_grad(z: np.ndarray) -> np.ndarray:
    return np.where(z > 0, 1.0, 0.2)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -30.0, 30.0)))


def _bce(p: np.ndarray, t: np.ndarray) -> float:
    p = np.clip(p, 1e-12, 1.0 - 1e-12)
    return float(-(t * np.log(p) + (1.0 - t) * np.log(1.0 - p)).mean())


def adversarial_init(
    src: EmbeddingSpace, tgt: EmbeddingSpace, cfg: AdversarialConfig | None = None
) -> AdversarialResult:
    """Learn an initial orthogonal map without any seed dictionary.

    A one-hidden-layer discriminator is trained to tell mapped source
    samples from target samples while the map W is updated to fool it;
    W starts at the identity and is projected back to the nearest
    orthogonal matrix after every generator step.  Deterministic given
    ``cfg.seed``; returns the per-epoch training trace.
    """
    cfg = cfg or AdversarialConfig()
    ensure_normalized(src, "source space")
    ensure_normalized(tgt, "target space")
    if src.dim != tgt.dim:
        raise ValidationError(f"dimension mismatch: {src.dim} vs {tgt.dim}")

    d = src.dim
    s_pool = src.vectors[: min(cfg.vocab_cap, len(src))]
    t_pool = tgt.vectors[: min(cfg.vocab_cap, len(tgt))]
    n_s, n_t = len(s_pool), len(t_pool)
    batch = min(cfg.batch_size, n_s, n_t)
    batches_per_epoch = max(1, min(n_s, n_t) // batch)
    smooth = cfg.label_smoothing
    hidden = cfg.discriminator_hidden_units

    rng = np.random.default_rng(cfg.seed)
    w = np.eye(d)
    hidden_w = rng.standard_normal((hidden, d)) / np.sqrt(d)
    hidden_b = np.zeros(hidden)
    out_w = rng.standard_normal(hidden) / np.sqrt(hidden)
    out_b = 0.0
    velocity = np.zeros((d, d))
    lr_d = cfg.discriminator_lr
    lr_g = cfg.generator_lr

    def discriminate(x):
        z1 = x @ hidden_w.T + hidden_b
        h1 = _leaky_relu(z1)
        p = _sigmoid(h1 @ out_w + out_b)
        return z1, h1, p

    trace: list[EpochTrace] = []
    # divergence is detected through the loss checks below, so numpy's
    # overflow warnings on the way there are just noise
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(cfg.epochs):
            accs, d_losses, g_losses = [], [], []
            for _ in range(batches_per_epoch):
                # discriminator step: mapped source labeled `smooth`,
                # target labeled `1 - smooth`
                xi = rng.integers(0, n_s, batch)
                yi = rng.integers(0, n_t, batch)
                inputs = np.vstack([s_pool[xi] @ w.T, t_pool[yi]])
                labels = np.concatenate(
                    [np.full(batch, smooth), np.full(batch, 1.0 - smooth)]
                )
                z1, h1, p = discriminate(inputs)
                d_loss = _bce(p, labels)
                if not np.isfinite(d_loss):
                    raise TrainingDivergenceError(
                        f"discriminator loss diverged at epoch {epoch + 1}"
                    )
                d_losses.append(d_loss)
                is_target = np.concatenate([np.zeros(batch), np.ones(batch)])
                accs.append(float(((p >= 0.5) == (is_target > 0.5)).mean()))
                dz2 = (p - labels) / len(labels)
                dz1 = (dz2[:, None] * out_w[None, :]) * _leaky_relu_grad(z1)
                hidden_w -= lr_d * dz1.T @ inputs
                hidden_b -= lr_d * dz1.sum(axis=0)
                out_w -= lr_d * h1.T @ dz2
                out_b -= lr_d * float(dz2.sum())

                # generator step: make mapped samples look like targets
                gi = rng.integers(0, n_s, batch)
                x = s_pool[gi]
                mapped = x @ w.T
                z1, h1, p = discriminate(mapped)
                fool = np.full(batch, 1.0 - smooth)
                g_loss = _bce(p, fool)
                if not np.isfinite(g_loss):
                    raise TrainingDivergenceError(
                        f"generator loss diverged at epoch {epoch + 1}"
                    )
                g_losses.append(g_loss)
                dz2 = (p - fool) / batch
                dz1 = (dz2[:, None] * out_w[None, :]) * _leaky_relu_grad(z1)
                gradient = (dz1 @ hidden_w).T @ x
                velocity = cfg.generator_momentum * velocity + gradient
                updated = w - lr_g * velocity
                if not np.isfinite(updated).all():
                    raise TrainingDivergenceError(
                        f"mapping update diverged at epoch {epoch + 1}"
                    )
                w = linalg.nearest_orthogonal(updated)

            if epoch + 1 > cfg.lr_hold_epochs:
                lr_d *= cfg.lr_decay
                lr_g *= cfg.lr_decay
            trace.append(
                EpochTrace(
                    epoch=epoch + 1,
                    discriminator_accuracy=float(np.mean(accs)),
                    discriminator_loss=float(np.mean(d_losses)),
                    generator_loss=float(np.mean(g_losses)),
                    orthogonality_residual=linalg.orthogonality_residual(w),
                )
            )

    return AdversarialResult(matrix=TranslationMatrix.from_matrix(w), trace=trace)
