"""Symmetric PSD matrix square roots via eigendecomposition."""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError, NumericError

__all__ = ["psd_sqrt", "psd_inv_sqrt", "psd_project"]


def _check_symmetric(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")
    scale = max(float(np.max(np.abs(A))), 1.0)
    if float(np.max(np.abs(A - A.T))) > 1e-8 * scale:
        raise InvalidInputError("matrix is not symmetric within 1e-8")
    return 0.5 * (A + A.T)


def psd_sqrt(A, tol: float = 1e-12) -> np.ndarray:
    """Symmetric square root; eigenvalues below tol*max are clamped to zero."""
    A = _check_symmetric(A)
    vals, vecs = np.linalg.eigh(A)
    cut = tol * max(float(vals.max()), 0.0)
    vals = np.where(vals > cut, vals, 0.0)
    return (vecs * np.sqrt(vals)) @ vecs.T


def psd_inv_sqrt(A, tol: float = 1e-12) -> np.ndarray:
    """Inverse symmetric square root; eigenvalues are floored at tol*max."""
    A = _check_symmetric(A)
    vals, vecs = np.linalg.eigh(A)
    top = float(vals.max())
    if top <= 0.0:
        raise NumericError("matrix has no positive eigenvalue; inverse sqrt undefined")
    vals = np.maximum(vals, tol * top)
    return (vecs / np.sqrt(vals)) @ vecs.T


def psd_project(A):
    """Nearest PSD matrix (negative eigenvalues clamped to zero).

    Returns ``(projected, clamped_mass)`` where ``clamped_mass`` is the total
    absolute eigenvalue mass removed by the projection.
    """
    A = _check_symmetric(A)
    vals, vecs = np.linalg.eigh(A)
    clamped = float(np.sum(np.abs(vals[vals < 0.0])))
    vals = np.maximum(vals, 0.0)
    return (vecs * vals) @ vecs.T, clamped
