"""Asymptotic covariance building blocks computed by quadrature.

For a fitted family with pseudo-true parameter ``theta0`` and true spectral
density ``f``, the limiting covariance of the normalized estimator is
``W^{-1} (V1 + V2) W^{-1}`` with

    W  = d^2/dtheta^2 D(theta0, f),
    V1 = 4 pi int g g^T f^2 dlam,

and, for linear processes with innovation excess kurtosis ``eta4``,

    V2 = eta4 * (int g f dlam) (int g f dlam)^T,

where ``g = -(2 pi)^{-1} d/dtheta (1/f_theta)`` at ``theta0``.  Integrands are
smooth and 2*pi-periodic, so the periodic trapezoid rule converges
spectrally; each integral is evaluated at two resolutions and the difference
is required to meet the tolerance.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericError
from .families import SpectralFamily
from .whittle import score_vector

__all__ = ["oracle_matrices", "oracle_v2_linear"]


def _periodic_nodes(M: int) -> np.ndarray:
    return -np.pi + 2.0 * np.pi * np.arange(M) / M


def _integrate_checked(integrand, M: int, tol: float, what: str):
    """Periodic trapezoid value at resolution M, validated against 2M."""
    coarse = integrand(_periodic_nodes(M)) * (2.0 * np.pi / M)
    fine = integrand(_periodic_nodes(2 * M)) * (np.pi / M)
    coarse_val = coarse.sum(axis=-1)
    fine_val = fine.sum(axis=-1)
    scale = max(float(np.max(np.abs(fine_val))), 1.0)
    if float(np.max(np.abs(fine_val - coarse_val))) > tol * scale:
        raise NumericError(f"quadrature for {what} did not converge at M={M}")
    return fine_val


def oracle_matrices(
    family: SpectralFamily, theta0, f, tol: float = 1e-8, M: int = 8192
):
    """(W, V1) for the family at theta0 against the density callable ``f``."""
    theta0 = np.asarray(theta0, dtype=float)

    def w_integrand(lam):
        fv = np.asarray(f(lam), dtype=float)
        return (family.d2_log_f(theta0, lam) + fv * family.d2_inv_f(theta0, lam)) / (
            2.0 * np.pi
        )

    def v1_integrand(lam):
        fv = np.asarray(f(lam), dtype=float)
        g = score_vector(family, theta0, lam)
        return 4.0 * np.pi * g[:, None, :] * g[None, :, :] * fv**2

    W = _integrate_checked(w_integrand, M, tol, "W")
    V1 = _integrate_checked(v1_integrand, M, tol, "V1")
    return W, V1


def oracle_v2_linear(family: SpectralFamily, theta0, f, eta4: float, tol: float = 1e-8, M: int = 8192):
    """Fourth-order term for linear processes: ``eta4 * v v^T`` with ``v = int g f``."""
    theta0 = np.asarray(theta0, dtype=float)

    def v_integrand(lam):
        fv = np.asarray(f(lam), dtype=float)
        return score_vector(family, theta0, lam) * fv

    v = _integrate_checked(v_integrand, M, tol, "V2 score integral")
    return eta4 * np.outer(v, v)
