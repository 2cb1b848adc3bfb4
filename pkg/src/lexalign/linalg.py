"""Dense linear-algebra kernels shared by the rest of the toolkit.

Thin, tolerance-based contracts over LAPACK (through ``numpy.linalg``):
deterministic SVD sign conventions, validated symmetric eigenvalues, and
cosine products over unit-normalized rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

SYMMETRY_RTOL = 1e-9
UNIT_ROW_ATOL = 1e-6


def as_matrix(values, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite float64 2-D array, rejecting NaN/Inf entries."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValidationError(f"{name}: expected a 2-D array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        i, j = np.argwhere(~np.isfinite(arr))[0]
        raise ValidationError(f"{name}: non-finite entry at row {i}, column {j}")
    return arr


def ensure_unit_rows(m: np.ndarray, name: str = "matrix", atol: float = UNIT_ROW_ATOL) -> None:
    """Reject matrices whose rows are not unit-normalized within ``atol``."""
    norms = np.linalg.norm(m, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > atol)
    if bad.size:
        i = int(bad[0])
        raise ValidationError(f"{name}: row {i} has norm {norms[i]:.6g}, expected 1")


@dataclass(frozen=True)
class SvdResult:
    """Reduced SVD ``u @ diag(s) @ v.T`` with deterministic column signs."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


def svd(m) -> SvdResult:
    """Singular value decomposition with a fixed sign convention.

    Signs are chosen so the largest-magnitude entry of each column of
    ``u`` is positive; the matching column of ``v`` is flipped with it,
    which leaves the reconstruction unchanged.
    """
    arr = as_matrix(m)
    if min(arr.shape) < 1:
        raise ValidationError("svd: input needs at least one row and one column")
    u, s, vt = np.linalg.svd(arr, full_matrices=False)
    v = vt.T
    lead = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[lead, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return SvdResult(u=u * signs, s=s, v=v * signs)


def sym_eigenvalues(m) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, sorted descending."""
    arr = as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise ValidationError(
            f"sym_eigenvalues: matrix is {arr.shape[0]}x{arr.shape[1]}, not square"
        )
    norm = np.linalg.norm(arr)
    if norm > 0 and np.linalg.norm(arr - arr.T) > SYMMETRY_RTOL * norm:
        raise ValidationError("sym_eigenvalues: matrix is not symmetric")
    return np.linalg.eigvalsh(arr)[::-1].copy()


def cosine_matrix(a, b) -> np.ndarray:
    """Pairwise cosines between the unit-normalized rows of ``a`` and ``b``."""
    am = as_matrix(a, "a")
    bm = as_matrix(b, "b")
    if am.shape[1] != bm.shape[1]:
        raise ValidationError(
            f"cosine_matrix: dimension mismatch ({am.shape[1]} vs {bm.shape[1]})"
        )
    ensure_unit_rows(am, "a")
    ensure_unit_rows(bm, "b")
    return am @ bm.T


def nearest_orthogonal(m: np.ndarray) -> np.ndarray:
    """Closest orthogonal matrix in Frobenius norm (the polar factor)."""
    res = svd(m)
    return res.u @ res.v.T


def orthogonality_residual(w: np.ndarray) -> float:
    """Frobenius distance of ``w.T @ w`` from the identity."""
    arr = np.asarray(w, dtype=np.float64)
    return float(np.linalg.norm(arr.T @ arr - np.eye(arr.shape[1])))
