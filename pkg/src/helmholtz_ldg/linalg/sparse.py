"""
Complex sparse storage and direct solves (SuperLU with COLAMD ordering).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp
import scipy.sparse.linalg as spla

RESIDUAL_TOLERANCE = 1e-10

ComplexSparseMatrix = sp.csr_matrix


class SolverError(RuntimeError):
    """Singular system or failed residual check."""

    def __init__(self, message: str, pivot: int | None = None, residual: float | None = None):
        super().__init__(message)
        self.pivot = pivot
        self.residual = residual


def from_triplets(rows, cols, values, shape: tuple[int, int]) -> sp.csr_matrix:
    """
    Sum duplicate (row, col) triplets into compressed-row storage with sorted,
    unique column indices per row.
    """
    rows = np.concatenate([np.ravel(r) for r in rows]) if isinstance(rows, list) else np.ravel(rows)
    cols = np.concatenate([np.ravel(c) for c in cols]) if isinstance(cols, list) else np.ravel(cols)
    values = (
        np.concatenate([np.ravel(v) for v in values]) if isinstance(values, list) else np.ravel(values)
    ).astype(complex)
    matrix = sp.coo_matrix((values, (rows, cols)), shape=shape).tocsr()
    matrix.sum_duplicates()
    matrix.eliminate_zeros()
    matrix.sort_indices()
    return matrix


def matvec(matrix: sp.spmatrix, x) -> np.ndarray:
    x = np.asarray(x)
    if matrix.shape[1] != x.shape[0]:
        raise ValueError(f"dimension mismatch: matrix has {matrix.shape[1]} columns, vector has {x.shape[0]} entries")
    return matrix @ x


def relative_residual(matrix: sp.spmatrix, x, b) -> float:
    b = np.asarray(b)
    norm_b = np.linalg.norm(b)
    residual = np.linalg.norm(matvec(matrix, x) - b)
    return float(residual / norm_b) if norm_b > 0 else float(residual)


def _check_structure(matrix: sp.csr_matrix) -> None:
    empty_rows = np.flatnonzero(np.diff(matrix.indptr) == 0)
    if len(empty_rows):
        raise SolverError(f"structurally singular: row {empty_rows[0]} is empty", pivot=int(empty_rows[0]))
    empty_cols = np.flatnonzero(np.bincount(matrix.indices, minlength=matrix.shape[1]) == 0)
    if len(empty_cols):
        raise SolverError(f"structurally singular: column {empty_cols[0]} is empty", pivot=int(empty_cols[0]))


class LUFactor:
    """
    Sparse LU factorization that can be reused for several right-hand sides.

    The factor is not modified by ``solve``; concurrent solves with distinct
    right-hand sides are safe.
    """

    def __init__(self, matrix: sp.spmatrix, tolerance: float = RESIDUAL_TOLERANCE):
        matrix = sp.csr_matrix(matrix, dtype=complex)
        if matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"matrix must be square, got {matrix.shape}")
        _check_structure(matrix)
        self.matrix = matrix
        self.tolerance = tolerance
        try:
            self._lu = spla.splu(matrix.tocsc(), permc_spec="COLAMD")
        except RuntimeError as exc:
            raise SolverError(f"numerically singular matrix: {exc}") from exc
        diagonal = self._lu.U.diagonal()
        zero_pivots = np.flatnonzero(diagonal == 0)
        if len(zero_pivots):
            raise SolverError(f"numerically singular: zero pivot at {zero_pivots[0]}", pivot=int(zero_pivots[0]))

    def solve(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=complex)
        if b.shape[0] != self.matrix.shape[0]:
            raise ValueError(f"dimension mismatch: matrix is {self.matrix.shape[0]}, right-hand side {b.shape[0]}")
        x = self._lu.solve(b)
        columns = [(x, b)] if b.ndim == 1 else [(x[:, j], b[:, j]) for j in range(b.shape[1])]
        for xj, bj in columns:
            residual = relative_residual(self.matrix, xj, bj)
            if not np.isfinite(residual) or residual > self.tolerance:
                raise SolverError(f"residual check failed: {residual:.3e} > {self.tolerance:.1e}", residual=residual)
        return x


def sparse_lu_solve(matrix: sp.spmatrix, b, tolerance: float = RESIDUAL_TOLERANCE) -> np.ndarray:
    """Solve Ax = b with a fill-reducing, row-pivoted sparse LU and a residual check."""
    b = np.asarray(b, dtype=complex)
    if matrix.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: matrix is {matrix.shape[0]}, right-hand side {b.shape[0]}")
    return LUFactor(matrix, tolerance=tolerance).solve(b)


def export_matrix_market(matrix: sp.spmatrix, path, comment: str = "") -> Path:
    """Write the matrix as MatrixMarket coordinate complex general."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # a file object keeps the name as given (mmwrite appends .mtx to bare names)
    with open(path, "wb") as f:
        scipy.io.mmwrite(f, sp.coo_matrix(matrix, dtype=complex), comment=comment, field="complex", symmetry="general")
    return path
