"""Fourier grids, DFTs and periodograms (plain, tapered and sliding-window).

Conventions used throughout the package:

* Fourier frequencies ``lam_j = 2*pi*j/n``.  The two-sided index sets are
  ``F_n = {-floor((n-1)/2), ..., floor(n/2)}`` and
  ``G_n = {-N, ..., -1, 1, ..., N}`` with ``N = floor(n/2)``.
* The DFT is ``J(lam) = sum_{t=1..n} X_t exp(-i*lam*t)`` (summation index
  starting at 1, matching the time convention of the estimators built on top).
* Periodogram ordinates are ``|J(lam_j)|^2 / (2*pi*n)`` so that their
  expectation approximates the spectral density; windows of length ``b`` use
  the divisor ``2*pi*b``.
* All ordinates are stored on the positive half-grid ``j = 1..N`` only; the
  value at ``-j`` equals the value at ``+j`` by symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "TimeSeries",
    "FourierGrid",
    "Periodogram",
    "Taper",
    "fourier_grid",
    "dft",
    "periodogram",
    "taper_weights",
    "tapered_periodogram",
    "subsample_periodograms",
    "read_series_csv",
]


@dataclass(frozen=True)
class TimeSeries:
    """A finite real-valued sample of a stationary process.

    ``centered`` records whether the sample mean has been subtracted; the
    estimators in this package assume a mean-zero series and center on entry.
    """

    values: np.ndarray
    centered: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1:
            raise InvalidInputError("time series must be one-dimensional")
        if vals.size < 4:
            raise InvalidInputError(f"need at least 4 observations, got {vals.size}")
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("time series contains non-finite values")
        if self.centered:
            sd = float(np.std(vals))
            tol = 1e-9 * vals.size * max(sd, 1.0)
            if abs(float(np.sum(vals))) > tol:
                raise InvalidInputError("series flagged as centered but mean is not zero")

    @property
    def n(self) -> int:
        return self.values.size

    def center(self) -> "TimeSeries":
        """Return the mean-centered version of this series."""
        if self.centered:
            return self
        return TimeSeries(self.values - self.values.mean(), centered=True)


@dataclass(frozen=True)
class FourierGrid:
    """Fourier frequencies of a length-``n`` sample.

    Only the positive half ``lam_pos[j-1] = 2*pi*j/n`` for ``j = 1..N`` is
    stored; symmetric sums over ``G_n`` weight each stored frequency by two.
    """

    n: int
    N: int = field(init=False)
    lam_pos: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.n < 4:
            raise InvalidInputError(f"sample size must be >= 4, got {self.n}")
        N = self.n // 2
        object.__setattr__(self, "N", N)
        j = np.arange(1, N + 1, dtype=float)
        object.__setattr__(self, "lam_pos", 2.0 * np.pi * j / self.n)

    @property
    def f_n_indices(self) -> np.ndarray:
        """The two-sided index set F_n = {-floor((n-1)/2), ..., floor(n/2)}."""
        return np.arange(-((self.n - 1) // 2), self.n // 2 + 1)

    @property
    def g_n_indices(self) -> np.ndarray:
        """The index set G_n = {-N, ..., -1, 1, ..., N} (zero excluded)."""
        j = np.arange(1, self.N + 1)
        return np.concatenate([-j[::-1], j])


def fourier_grid(n: int) -> FourierGrid:
    """Build the Fourier grid for a sample of size ``n`` (requires ``n >= 4``)."""
    return FourierGrid(int(n))


@dataclass(frozen=True)
class Periodogram:
    """Periodogram ordinates on the positive half of a Fourier grid."""

    grid: FourierGrid
    ordinates: np.ndarray

    def __post_init__(self):
        ords = np.asarray(self.ordinates, dtype=float)
        object.__setattr__(self, "ordinates", ords)
        if ords.shape != (self.grid.N,):
            raise InvalidInputError(
                f"expected {self.grid.N} ordinates, got shape {ords.shape}"
            )
        if not np.all(np.isfinite(ords)) or np.any(ords < 0):
            raise InvalidInputError("periodogram ordinates must be finite and >= 0")


def dft(series: TimeSeries) -> np.ndarray:
    """Finite Fourier transform ``J(lam_j) = sum_t X_t exp(-i lam_j t)`` for j = 0..N.

    Negative frequencies follow by conjugation.  Computed by FFT; the phase
    factor accounts for the summation index running from 1 rather than 0.
    """
    x = series.values
    n = x.size
    N = n // 2
    coef = np.fft.rfft(x)[: N + 1]
    j = np.arange(N + 1)
    return coef * np.exp(-2j * np.pi * j / n)


def _pos_ordinates(x: np.ndarray, two_pi_len: int) -> np.ndarray:
    """|rfft|^2 / (2*pi*len) on j = 1..floor(len/2), along the last axis."""
    coef = np.fft.rfft(x, axis=-1)
    N = x.shape[-1] // 2
    mag = np.abs(coef[..., 1 : N + 1]) ** 2
    return mag / (2.0 * np.pi * two_pi_len)


def periodogram(series: TimeSeries) -> Periodogram:
    """Periodogram of a (centered) series: ``I(lam_j) = |J(lam_j)|^2 / (2 pi n)``."""
    s = series.center()
    grid = fourier_grid(s.n)
    return Periodogram(grid, _pos_ordinates(s.values, s.n))


@dataclass(frozen=True)
class Taper:
    """Data taper weights ``h_t = h(t/n)`` with power sums ``H_k = sum_t h_t^k``."""

    weights: np.ndarray
    h2: float = field(init=False)
    h1: float = field(init=False)
    h4: float = field(init=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if np.any(w < 0.0) or np.any(w > 1.0):
            raise InvalidInputError("taper weights must lie in [0, 1]")
        object.__setattr__(self, "h1", float(np.sum(w)))
        object.__setattr__(self, "h2", float(np.sum(w**2)))
        object.__setattr__(self, "h4", float(np.sum(w**4)))
        if self.h2 <= 0.0:
            raise InvalidInputError("taper has zero energy (H_2 = 0)")

    @property
    def n(self) -> int:
        return self.weights.size


def taper_weights(kind: str, n: int, rho: float | None = None) -> Taper:
    """Construct taper weights of length ``n``.

    ``kind`` is ``"rectangular"`` (all ones) or ``"tukey"`` with taper
    proportion ``rho`` in [0, 1]: a cosine ramp over the first and last
    ``rho/2`` fraction of the sample.  ``tukey`` with ``rho = 0`` degenerates
    to the rectangular taper; ``rho = 1`` is the full cosine (Hann) window.
    """
    if n < 1:
        raise InvalidInputError("taper length must be positive")
    if kind == "rectangular":
        return Taper(np.ones(n))
    if kind == "tukey":
        if rho is None:
            rho = 0.5
        if not (0.0 <= rho <= 1.0):
            raise InvalidInputError(f"tukey taper proportion must be in [0, 1], got {rho}")
        x = np.arange(1, n + 1, dtype=float) / n
        w = np.ones(n)
        if rho > 0.0:
            half = rho / 2.0
            lo = x < half
            w[lo] = 0.5 * (1.0 - np.cos(2.0 * np.pi * x[lo] / rho))
            hi = x > 1.0 - half
            w[hi] = 0.5 * (1.0 - np.cos(2.0 * np.pi * (1.0 - x[hi]) / rho))
        return Taper(w)
    raise InvalidInputError(f"unknown taper kind {kind!r}")


def tapered_periodogram(series: TimeSeries, taper: Taper) -> Periodogram:
    """Tapered periodogram ``|sum_t h_t X_t e^{-i lam t}|^2 / (2 pi H_2)``."""
    s = series.center()
    if taper.n != s.n:
        raise InvalidInputError(
            f"taper length {taper.n} does not match series length {s.n}"
        )
    grid = fourier_grid(s.n)
    coef = np.fft.rfft(taper.weights * s.values)
    mag = np.abs(coef[1 : grid.N + 1]) ** 2
    return Periodogram(grid, mag / (2.0 * np.pi * taper.h2))


def subsample_periodograms(
    series: TimeSeries, b: int, taper: Taper | None = None
) -> np.ndarray:
    """Periodograms of all sliding windows of length ``b``.

    Returns an array of shape ``(n - b + 1, floor(b/2))`` whose row ``t`` holds
    the ordinates of the window ``(X_t, ..., X_{t+b-1})`` on the length-``b``
    grid.  The series is centered with the full-sample mean once; windows are
    not re-centered, preserving the stationary windowing.  An optional taper
    (of length ``b``) is applied to every window.
    """
    s = series.center()
    n = s.n
    if not (4 <= b <= n):
        raise InvalidInputError(f"window length must satisfy 4 <= b <= {n}, got {b}")
    windows = np.lib.stride_tricks.sliding_window_view(s.values, b)
    if taper is not None:
        if taper.n != b:
            raise InvalidInputError(
                f"taper length {taper.n} does not match window length {b}"
            )
        coef = np.fft.rfft(windows * taper.weights, axis=-1)[:, 1 : b // 2 + 1]
        return np.abs(coef) ** 2 / (2.0 * np.pi * taper.h2)
    return _pos_ordinates(windows, b)


def read_series_csv(path) -> TimeSeries:
    """Read a single-column CSV (optional header) into a TimeSeries."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            token = line.split(",")[0].strip()
            try:
                values.append(float(token))
            except ValueError:
                if lineno == 1:  # header row
                    continue
                raise InvalidInputError(
                    f"non-numeric value {token!r} on line {lineno} of {path}"
                ) from None
    if len(values) < 4:
        raise InvalidInputError(f"{path} holds {len(values)} values; need at least 4")
    return TimeSeries(np.asarray(values))
