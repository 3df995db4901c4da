"""Principal component analysis over standardized feature rows.

The symmetric sample covariance is diagonalized with cyclic Jacobi rotations
(no external solver); components are returned as orthonormal rows sorted by
explained variance with a deterministic sign convention.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .features import Standardization

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def jacobi_eigh(matrix: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigenvalues/eigenvectors of a symmetric matrix by cyclic Jacobi sweeps.

    Sweeps run until the off-diagonal Frobenius norm falls below tol times the
    matrix Frobenius norm (or max_sweeps). Returns (eigenvalues, columns).
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    v = np.eye(n)
    frob = np.linalg.norm(a)
    if frob == 0 or n == 1:
        return np.diag(a).copy(), v
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, np.sum(a * a) - np.sum(np.diag(a) ** 2)))
        if off <= tol * frob:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, q] = a[q, p] = 0.0
                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    return np.diag(a).copy(), v


@dataclass(frozen=True)
class PcaModel:
    """Orthonormal component rows (dim x dim) sorted by descending variance."""

    components: np.ndarray
    explained_variance: np.ndarray
    center: np.ndarray
    standardization: Standardization | None = None

    @property
    def input_dim(self) -> int:
        return self.components.shape[1]

    def explained_variance_ratio(self) -> np.ndarray:
        total = self.explained_variance.sum()
        if total <= 0:
            return np.zeros_like(self.explained_variance)
        return self.explained_variance / total

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": "gaitml-pca/1",
                "components": self.components.tolist(),
                "explained_variance": self.explained_variance.tolist(),
                "center": self.center.tolist(),
            },
            sort_keys=True,
        )


def fit_pca(X: np.ndarray, standardization: Standardization | None = None) -> PcaModel:
    """Diagonalize the sample covariance (divisor n-1) of standardized rows."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("PCA needs a 2-D matrix with at least 2 rows")
    center = X.mean(axis=0)
    xc = X - center
    cov = xc.T @ xc / (X.shape[0] - 1)
    eigvals, eigvecs = jacobi_eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    components = eigvecs[:, order].T
    # deterministic orientation: the largest-magnitude loading is positive
    for row in components:
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0:
            row *= -1.0
    return PcaModel(
        components=components,
        explained_variance=eigvals,
        center=center,
        standardization=standardization,
    )


def project(model: PcaModel, X: np.ndarray, n_components: int) -> np.ndarray:
    """Project rows onto the top-n components (input must match fit scaling)."""
    if not (1 <= n_components <= model.input_dim):
        raise ValueError(f"n_components must be in [1, {model.input_dim}], got {n_components}")
    X = np.asarray(X, dtype=float)
    if X.shape[1] != model.input_dim:
        raise ValueError(f"expected {model.input_dim} columns, got {X.shape[1]}")
    return (X - model.center) @ model.components[:n_components].T


def reconstruct(model: PcaModel, projected: np.ndarray) -> np.ndarray:
    """Inverse of project for however many components the rows carry."""
    projected = np.asarray(projected, dtype=float)
    n = projected.shape[1]
    return projected @ model.components[:n] + model.center
