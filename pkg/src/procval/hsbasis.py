"""Hermitian operator basis per subsystem and decomposition of multipartite
operators into real-coefficient tensor-product terms.

The basis for dimension d is the generalized Gell-Mann construction with the
identity in slot 0, rescaled so that trace(s_i s_j) = d * delta_ij. For d = 2
this reproduces the Pauli matrices {I, X, Y, Z} exactly. Index ordering within
each dimension: identity, then symmetric (X-like) elements by (row, col), then
antisymmetric (Y-like) by (row, col), then diagonal (Z-like) ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import linalg

__all__ = ["HSBasis", "HSTerm", "make_basis", "decompose", "reconstruct",
           "coefficient_tensor", "default_term_tol"]


@dataclass(frozen=True)
class HSBasis:
    """Orthogonal Hermitian basis of L(C^d): d*d operators, identity first."""

    dim: int
    ops: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.ops)


@dataclass(frozen=True, order=True)
class HSTerm:
    """One tensor-product basis term: a basis index per subsystem (0 means
    identity) and a real coefficient."""

    indices: tuple[int, ...]
    coeff: float

    def is_trivial(self) -> bool:
        return all(i == 0 for i in self.indices)


@lru_cache(maxsize=None)
def make_basis(d: int) -> HSBasis:
    """Build (and cache) the Hermitian operator basis for dimension ``d``."""
    if d < 1:
        raise ValueError("basis dimension must be >= 1")
    ops = [np.eye(d, dtype=np.complex128)]
    scale = math.sqrt(d / 2.0)
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=np.complex128)
            m[j, k] = scale
            m[k, j] = scale
            ops.append(m)
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=np.complex128)
            m[j, k] = -1j * scale
            m[k, j] = 1j * scale
            ops.append(m)
    for l in range(1, d):
        diag = [1.0] * l + [-float(l)] + [0.0] * (d - l - 1)
        m = np.diag(np.asarray(diag, dtype=np.complex128))
        m *= scale * math.sqrt(2.0 / (l * (l + 1)))
        ops.append(m)
    for m in ops:
        m.setflags(write=False)
    return HSBasis(dim=d, ops=tuple(ops))


@lru_cache(maxsize=None)
def _extraction_matrix(d: int) -> np.ndarray:
    """Rows are the flattened transposed basis elements, so that
    row i contracted with a flattened (row, col) pair block of the operator
    yields trace(m s_i) for that subsystem."""
    basis = make_basis(d)
    return np.stack([op.T.reshape(-1) for op in basis.ops])


@lru_cache(maxsize=None)
def _synthesis_matrix(d: int) -> np.ndarray:
    """Columns are the flattened basis elements (inverse direction)."""
    basis = make_basis(d)
    return np.stack([op.reshape(-1) for op in basis.ops]).T


def coefficient_tensor(m, dims: Sequence[int]) -> np.ndarray:
    """Full coefficient array of a Hermitian operator over the tensor-product
    basis, shape (d_1^2, ..., d_n^2); entry [i1,...,in] = trace(m s_I) / D.

    Raises ValueError for non-Hermitian input or if the extracted
    coefficients carry an imaginary residue above 1e-10 (scaled).
    """
    a = linalg.require_hermitian(m)
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    total = int(np.prod(dims)) if dims else 1
    if total != a.shape[0]:
        raise ValueError(f"shape {dims} does not match matrix dimension {a.shape[0]}")
    t = a.reshape(dims + dims)
    # Interleave (row_k, col_k) and merge each pair into one axis of size d_k^2.
    order = [ax for k in range(n) for ax in (k, k + n)]
    t = t.transpose(order).reshape([d * d for d in dims])
    for k, d in enumerate(dims):
        t = np.moveaxis(np.tensordot(_extraction_matrix(d), t, axes=(1, k)), 0, k)
    t = t / total
    residue = float(np.abs(t.imag).max()) if t.size else 0.0
    if residue > 1e-10 * (1.0 + float(np.abs(t.real).max(initial=0.0))):
        raise ValueError(f"coefficient extraction left imaginary residue {residue:.3e}")
    return np.ascontiguousarray(t.real)


def default_term_tol(coeffs: np.ndarray) -> float:
    """Pruning threshold separating structural zeros from float residue."""
    peak = float(np.abs(coeffs).max(initial=0.0))
    return 1e-9 * max(1.0, peak)


def decompose(m, dims: Sequence[int], tol: float | None = None) -> list[HSTerm]:
    """Expand a Hermitian operator over the tensor-product basis.

    Returns the terms with |coefficient| > ``tol`` (default: relative
    threshold from :func:`default_term_tol`), sorted by multi-index.
    """
    coeffs = coefficient_tensor(m, dims)
    if tol is None:
        tol = default_term_tol(coeffs)
    hits = np.argwhere(np.abs(coeffs) > tol)
    return [HSTerm(indices=tuple(int(i) for i in idx), coeff=float(coeffs[tuple(idx)]))
            for idx in hits]


def reconstruct(terms: Sequence[HSTerm], dims: Sequence[int]) -> np.ndarray:
    """Sum of coeff * s_I over the given terms, as a dense operator."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    total = int(np.prod(dims)) if dims else 1
    shape = tuple(d * d for d in dims)
    coeffs = np.zeros(shape, dtype=np.float64)
    for t in terms:
        if len(t.indices) != n:
            raise ValueError(f"term {t.indices} does not match {n} subsystems")
        for i, d in zip(t.indices, dims):
            if not 0 <= i < d * d:
                raise IndexError(f"basis index {i} out of range for dimension {d}")
        coeffs[t.indices] += t.coeff
    t = coeffs.astype(np.complex128)
    for k, d in enumerate(dims):
        t = np.moveaxis(np.tensordot(_synthesis_matrix(d), t.reshape(t.shape), axes=(1, k)), 0, k)
    # Split each d^2 axis back into (row, col) and un-interleave.
    t = t.reshape([x for d in dims for x in (d, d)])
    rows_then_cols = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
    return np.ascontiguousarray(t.transpose(rows_then_cols).reshape(total, total))
