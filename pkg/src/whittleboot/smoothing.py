"""Nonparametric spectral density estimation.

The estimator is a kernel-smoothed periodogram using the Bartlett-Priestley
(quadratic) spectral window, with the bandwidth selected by frequency-domain
cross validation.  The smoothed estimate is strictly positive (a small floor
is applied) because every consumer divides by it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .spectral import Periodogram, TimeSeries, subsample_periodograms

__all__ = [
    "POSITIVITY_FLOOR_RATIO",
    "SpectralDensityEstimate",
    "SubsampleMeanSpectrum",
    "bartlett_priestley_weight",
    "kernel_spectral_estimate",
    "cv_bandwidth",
    "default_bandwidth_grid",
    "subsample_mean_spectrum",
]

# Relative floor on the smoothed spectrum: values below
# POSITIVITY_FLOOR_RATIO * max(f_hat) are clipped up to it.
POSITIVITY_FLOOR_RATIO = 1e-6


def bartlett_priestley_weight(u, h_bw: float):
    """Scaled Bartlett-Priestley kernel ``K(u/h)/h``.

    ``K(x) = (3/(4*pi)) * (1 - (x/pi)^2)`` for ``|x| <= pi`` and 0 outside, so
    the scaled kernel is supported on ``|u| < pi*h_bw`` and integrates to one.
    """
    if h_bw <= 0.0:
        raise InvalidInputError(f"bandwidth must be positive, got {h_bw}")
    x = np.asarray(u, dtype=float) / h_bw
    val = (3.0 / (4.0 * np.pi)) * (1.0 - (x / np.pi) ** 2)
    out = np.where(np.abs(x) <= np.pi, val, 0.0) / h_bw
    if np.ndim(u) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class SpectralDensityEstimate:
    """Smoothed spectral density on the positive Fourier grid of the sample.

    ``__call__`` evaluates at arbitrary frequencies by even-periodic linear
    interpolation of the grid values.
    """

    n: int
    ordinates: np.ndarray
    h_bw: float
    lam_pos: np.ndarray = field(init=False)

    def __post_init__(self):
        ords = np.asarray(self.ordinates, dtype=float)
        object.__setattr__(self, "ordinates", ords)
        N = self.n // 2
        if ords.shape != (N,):
            raise InvalidInputError(f"expected {N} ordinates, got {ords.shape}")
        if np.any(ords <= 0.0):
            raise InvalidInputError("smoothed spectrum must be strictly positive")
        j = np.arange(1, N + 1, dtype=float)
        object.__setattr__(self, "lam_pos", 2.0 * np.pi * j / self.n)

    def __call__(self, lam) -> np.ndarray:
        # Fold onto [0, pi] using evenness and 2*pi periodicity, then
        # interpolate; beyond the first/last grid point the interpolant is
        # constant, which is the linear interpolation between a grid value
        # and its mirror image.
        lam_arr = np.abs(np.asarray(lam, dtype=float))
        lam_arr = np.mod(lam_arr, 2.0 * np.pi)
        lam_arr = np.where(lam_arr > np.pi, 2.0 * np.pi - lam_arr, lam_arr)
        out = np.interp(lam_arr, self.lam_pos, self.ordinates)
        if np.ndim(lam) == 0:
            return float(out)
        return out


@dataclass(frozen=True)
class SubsampleMeanSpectrum:
    """Average of all sliding-window periodograms on the length-``b`` grid."""

    b: int
    ordinates: np.ndarray


def _folded_kernel_weights(n: int, h_bw: float) -> np.ndarray:
    """Bartlett-Priestley weights at grid offsets, folded onto the length-n circle."""
    half_width = int(np.floor(np.pi * h_bw * n / (2.0 * np.pi)))
    k = np.arange(-half_width, half_width + 1)
    w = bartlett_priestley_weight(2.0 * np.pi * k / n, h_bw)
    folded = np.zeros(n)
    np.add.at(folded, np.mod(k, n), w)
    return folded


def _smooth_on_circle(ords: np.ndarray, n: int, h_bw: float):
    """Kernel smoothing of the periodogram with the zero-frequency slot excluded.

    Returns ``(fhat_pos, num, den, w_circ)`` where ``fhat_pos`` are the
    smoothed values at j = 1..N and ``num/den`` are the raw weighted sums and
    weight masses per circle position (needed by the cross-validation
    leave-out corrections).
    """
    N = n // 2
    circ = np.zeros(n)
    j = np.arange(1, N + 1)
    circ[j] = ords
    circ[n - j] = ords  # overwrites j = N slot consistently when n is even
    mask = np.ones(n)
    mask[0] = 0.0

    w_circ = _folded_kernel_weights(n, h_bw)
    fw = np.fft.rfft(w_circ)
    num = np.fft.irfft(np.fft.rfft(circ * mask) * fw, n)
    den = np.fft.irfft(np.fft.rfft(mask) * fw, n)
    return num[1 : N + 1] / den[1 : N + 1], num, den, w_circ


def kernel_spectral_estimate(I: Periodogram, h_bw: float) -> SpectralDensityEstimate:
    """Smoothed periodogram with Bartlett-Priestley weights and bandwidth ``h_bw``.

    The weights are normalized to sum to one at every target frequency; the
    periodogram is extended evenly across 0 and pi (the zero-frequency
    ordinate is excluded from every window).  At the degenerate bandwidth
    ``h_bw = 2/n`` only the center ordinate receives weight, so the estimate
    equals the periodogram.
    """
    n = I.grid.n
    if not (2.0 / n <= h_bw <= np.pi):
        raise InvalidInputError(
            f"bandwidth must lie in [2/n, pi] = [{2.0 / n:.3g}, pi], got {h_bw}"
        )
    fhat, _, _, _ = _smooth_on_circle(I.ordinates, n, h_bw)
    floor = POSITIVITY_FLOOR_RATIO * max(fhat.max(), np.finfo(float).tiny)
    return SpectralDensityEstimate(n, np.maximum(fhat, floor), h_bw)


def default_bandwidth_grid(n: int, size: int = 15) -> np.ndarray:
    """Geometric bandwidth grid between 4*pi/n and pi/2 (``size`` points)."""
    lo = 4.0 * np.pi / n
    hi = np.pi / 2.0
    if lo >= hi:
        return np.array([hi])
    return np.geomspace(lo, hi, size)


def cv_bandwidth(I: Periodogram, grid=None) -> float:
    """Bandwidth minimizing the frequency-domain cross-validation criterion.

    ``CV(h) = sum_j log(fhat_loo_j) + I_j / fhat_loo_j`` where ``fhat_loo_j``
    is the smoothed value at lam_j with the ordinate pair (+j, -j) removed
    from the window and the remaining weights renormalized.  Ties break
    toward the smaller bandwidth.
    """
    n = I.grid.n
    N = I.grid.N
    if grid is None:
        grid = default_bandwidth_grid(n)
    grid = np.sort(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise InvalidInputError("bandwidth grid is empty")

    ords = I.ordinates
    j = np.arange(1, N + 1)
    best_h, best_cv = None, np.inf
    for h in grid:
        _, num, den, w_circ = _smooth_on_circle(ords, n, h)
        # Ordinate j occupies circle slots j and n-j; both must be removed
        # from the window centered at slot j.  When the two slots coincide
        # (j = n/2) the weight is counted once.
        w_self = w_circ[0] + np.where((2 * j) % n == 0, 0.0, w_circ[(2 * j) % n])
        num_loo = num[j] - w_self * ords
        den_loo = den[j] - w_self
        ok = den_loo > 1e-12
        if not np.all(ok):
            continue  # window too narrow to leave anything out
        floor = POSITIVITY_FLOOR_RATIO * max(
            (num_loo / den_loo).max(), np.finfo(float).tiny
        )
        f_loo = np.maximum(num_loo / den_loo, floor)
        cv = float(np.sum(np.log(f_loo) + ords / f_loo))
        if best_h is None or cv < best_cv - 1e-12 * max(1.0, abs(best_cv)):
            best_h, best_cv = float(h), cv
    if best_h is None:
        raise InvalidInputError("no usable bandwidth in the grid")
    return best_h


def subsample_mean_spectrum(series: TimeSeries, b: int) -> SubsampleMeanSpectrum:
    """Pointwise average of all n-b+1 sliding-window periodograms."""
    window_ords = subsample_periodograms(series, b)
    return SubsampleMeanSpectrum(b, window_ords.mean(axis=0))
