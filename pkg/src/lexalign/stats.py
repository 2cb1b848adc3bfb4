"""Pearson and Spearman correlation with explicit undefined handling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class Correlation:
    """Both coefficients; ``defined`` is False when variance is zero."""

    pearson: float | None
    spearman: float | None
    defined: bool


def _pearson(xs: np.ndarray, ys: np.ndarray) -> float | None:
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sx = float((dx**2).sum())
    sy = float((dy**2).sum())
    if sx == 0.0 or sy == 0.0:
        return None
    return float((dx * dy).sum() / np.sqrt(sx * sy))


def average_ranks(values) -> np.ndarray:
    """One-based ranks with ties assigned their average rank."""
    arr = np.asarray(values, dtype=np.float64)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(len(arr))
    sorted_values = arr[order]
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and sorted_values[j + 1] == sorted_values[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def correlation(xs, ys) -> Correlation:
    """Pearson on the values, Spearman as Pearson on average-tied ranks.

    Zero variance on either side yields an undefined (flagged) result
    instead of NaN.
    """
    xa = np.asarray(xs, dtype=np.float64)
    ya = np.asarray(ys, dtype=np.float64)
    if xa.ndim != 1 or ya.ndim != 1 or len(xa) != len(ya):
        raise ValidationError("correlation needs two equally long 1-D sequences")
    if len(xa) < 3:
        raise ValidationError("correlation needs at least 3 points")
    if not (np.isfinite(xa).all() and np.isfinite(ya).all()):
        raise ValidationError("correlation inputs must be finite")
    pearson = _pearson(xa, ya)
    spearman = _pearson(average_ranks(xa), average_ranks(ya))
    defined = pearson is not None and spearman is not None
    return Correlation(pearson=pearson, spearman=spearman, defined=defined)
