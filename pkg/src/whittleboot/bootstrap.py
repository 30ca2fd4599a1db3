"""Hybrid frequency-domain bootstrap for Whittle estimators.

One bootstrap session on a series of length n:

1. fit the data estimator and the centering parameter theta0_hat
   (minimizer against the smoothed spectrum fhat);
2. closed-form conditional variance V1*_n of the multiplicative part
   and, from a single pass over all sliding windows of length b, the
   convolved-subsampling matrices Sigma+_n, C+_n and V2+_n = Sigma+ - C+;
3. B independent replicates: pseudo-periodogram I*, re-estimate theta*,
   Hessian W*, standardized draw Z* = (V1*)^{-1/2} W* sqrt(n)(theta* - theta0),
   and the hybrid draw L* = (W*)^{-1} (V1* + V2+)^{1/2} Z*.

The multiplicative part alone (the draws sqrt(n)(theta* - theta0)) estimates
the covariance pieces driven by second-order structure; the convolved part
corrects for the fourth-order contribution that independent pseudo-periodogram
ordinates cannot reproduce.

Variants substitute tapered pseudo-periodograms (built from a Gaussian pseudo
series), the blurred-density objective, or boundary-extended transforms; see
``run_variant_bootstrap``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, NumericError
from .families import SpectralFamily
from .linalg import psd_inv_sqrt, psd_project, psd_sqrt
from .smoothing import (
    POSITIVITY_FLOOR_RATIO,
    SpectralDensityEstimate,
    cv_bandwidth,
    kernel_spectral_estimate,
)
from .spectral import (
    FourierGrid,
    Periodogram,
    Taper,
    TimeSeries,
    dft,
    fourier_grid,
    periodogram,
    subsample_periodograms,
    taper_weights,
    tapered_periodogram,
)
from .whittle import (
    ParamEstimate,
    boundary_extension_dft,
    debiased_family,
    minimize_whittle,
    pseudo_true_parameter,
    score_vector,
    select_ar_order_aic,
    whittle_hessian,
    yule_walker,
)

__all__ = [
    "BootstrapConfig",
    "BootstrapComponents",
    "BootstrapDistribution",
    "default_block_length",
    "mult_pseudo_periodogram",
    "v1_star",
    "w_star",
    "bootstrap_theta_star",
    "z_star",
    "convolved_m_plus",
    "sigma_plus",
    "c_plus",
    "v2_plus",
    "assemble_l_star",
    "w_hat_star",
    "gaussian_pseudo_series",
    "tapered_pseudo_periodogram",
    "run_hybrid_bootstrap",
    "run_variant_bootstrap",
]

_MAX_COND = 1e12

VARIANTS = ("standard", "tapered", "debiased", "boundary")


def default_block_length(n: int) -> int:
    """Practical subsample-length rule ``b = round(4 * n^0.25)``."""
    return int(round(4.0 * n**0.25))


@dataclass(frozen=True)
class BootstrapConfig:
    """Settings of one bootstrap session."""

    B: int = 1000
    b: int | None = None
    seed: int = 0
    variant: str = "standard"
    taper_rho: float = 0.5
    boundary_p: int | None = None
    bandwidth: float | None = None
    max_discard_frac: float = 0.05

    def __post_init__(self):
        if self.B < 100:
            raise InvalidInputError(f"need at least 100 replicates, got B={self.B}")
        if self.variant not in VARIANTS:
            raise InvalidInputError(
                f"variant must be one of {VARIANTS}, got {self.variant!r}"
            )

    def resolve_b(self, n: int) -> int:
        b = self.b if self.b is not None else default_block_length(n)
        if not (4 <= b <= n):
            raise InvalidInputError(f"block length must satisfy 4 <= b <= {n}, got {b}")
        return b


@dataclass(frozen=True)
class BootstrapComponents:
    """Session-level matrices and the standardized draws."""

    theta0: np.ndarray
    theta_hat: np.ndarray
    w_star_mean: np.ndarray
    v1_star: np.ndarray
    sigma_plus: np.ndarray
    c_plus: np.ndarray
    v2_plus: np.ndarray
    z_samples: np.ndarray
    root_n_centered: np.ndarray
    fhat: SpectralDensityEstimate
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BootstrapDistribution:
    """B draws of the hybrid statistic L* (one row per replicate)."""

    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", arr)
        if arr.ndim != 2:
            raise InvalidInputError("samples must be a B x m matrix")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("bootstrap samples contain non-finite values")

    @property
    def B(self) -> int:
        return self.samples.shape[0]

    @property
    def m(self) -> int:
        return self.samples.shape[1]

    def quantile(self, q, coord: int | None = None) -> np.ndarray:
        if coord is None:
            return np.quantile(self.samples, q, axis=0)
        return np.quantile(self.samples[:, coord], q)

    def percentile_ci(
        self, center, n: int, level: float = 0.95, reflect: bool = True
    ) -> np.ndarray:
        """Confidence interval per coordinate from percentile points of L*.

        With ``reflect=True`` (default) the draws approximate the law of
        ``sqrt(n) (estimate - truth)``, so the interval is
        ``[center - q_{1-a}/sqrt(n), center - q_a/sqrt(n)]``; this allocates a
        skewed distribution's tails correctly.  ``reflect=False`` gives the
        plain percentile form ``center + [q_a, q_{1-a}]/sqrt(n)``.
        """
        alpha = (1.0 - level) / 2.0
        lo = self.quantile(alpha)
        hi = self.quantile(1.0 - alpha)
        center = np.asarray(center, dtype=float)
        root_n = np.sqrt(n)
        if reflect:
            return np.stack([center - hi / root_n, center - lo / root_n], axis=-1)
        return np.stack([center + lo / root_n, center + hi / root_n], axis=-1)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"coord_{i}" for i in range(self.m)])
            writer.writerows(self.samples.tolist())

    def summary(self, center, n: int, level: float = 0.95) -> dict:
        qs = [0.01, 0.025, 0.05, 0.5, 0.95, 0.975, 0.99]
        ci = self.percentile_ci(center, n, level)
        return {
            "B": self.B,
            "m": self.m,
            "quantiles": {str(q): self.quantile(q).tolist() for q in qs},
            "ci_level": level,
            "ci": ci.tolist(),
        }


# ---------------------------------------------------------------------------
# elementary operations
# ---------------------------------------------------------------------------


def mult_pseudo_periodogram(fhat_vals: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Multiplicative pseudo-periodogram ``I*_j = fhat_j * U_j`` (U i.i.d. Exp(1))."""
    fhat_vals = np.asarray(fhat_vals, dtype=float)
    return fhat_vals * rng.standard_exponential(fhat_vals.shape)


def v1_star(fhat_vals, family: SpectralFamily, theta0, grid: FourierGrid) -> np.ndarray:
    """Exact conditional variance of the multiplicative score sum.

    ``(8 pi^2 / n) sum_{j in G_n} g g^T fhat^2``, evaluated on the positive
    half-grid with weight two.
    """
    g = score_vector(family, theta0, grid.lam_pos)  # (m, N)
    w = np.asarray(fhat_vals, dtype=float) ** 2
    return (16.0 * np.pi**2 / grid.n) * ((g * w) @ g.T)


def w_star(family: SpectralFamily, theta0, spec, grid: FourierGrid) -> np.ndarray:
    """Hessian of the objective at theta0 with the supplied spectrum values."""
    return whittle_hessian(theta0, spec, family, grid)


def bootstrap_theta_star(
    family: SpectralFamily,
    fhat_vals,
    grid: FourierGrid,
    rng: np.random.Generator,
    theta0,
) -> tuple[ParamEstimate, np.ndarray]:
    """One multiplicative replicate: draw I* and re-minimize from theta0."""
    istar = mult_pseudo_periodogram(fhat_vals, rng)
    est = minimize_whittle(family, istar, grid, theta_init=theta0, multistart=False)
    return est, istar


def z_star(v1s, ws, theta_star, theta0, n: int) -> np.ndarray:
    """Standardized draw ``(V1*)^{-1/2} W* sqrt(n) (theta* - theta0)``."""
    v1s = np.asarray(v1s, dtype=float)
    vals = np.linalg.eigvalsh(0.5 * (v1s + v1s.T))
    if vals.min() <= 1e-10 * max(np.trace(v1s), np.finfo(float).tiny):
        raise NumericError(
            f"V1* ill-conditioned: min eigenvalue {vals.min():.3e} vs trace {np.trace(v1s):.3e}"
        )
    delta = np.sqrt(n) * (np.asarray(theta_star, dtype=float) - np.asarray(theta0, dtype=float))
    return psd_inv_sqrt(v1s) @ (np.asarray(ws, dtype=float) @ delta)


# ---------------------------------------------------------------------------
# convolved subsampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _WindowPrep:
    """Shared machinery of the convolved part for a fixed (series, b)."""

    b: int
    k: int
    n_windows: int
    score_sums: np.ndarray        # A_t = sum_{j in G_b} g fhat U^{(t)}, shape (T, m)
    score_total: np.ndarray       # S = sum_{j in G_b} g fhat, shape (m,)
    sq_ratio_mean: np.ndarray     # q_j = mean_t U^{(t)}_j^2, shape (N_b,)
    g_pos: np.ndarray             # scores at lam_{j,b}, shape (m, N_b)
    fhat_b: np.ndarray            # fhat at lam_{j,b}, shape (N_b,)


def _window_prep(
    series: TimeSeries,
    b: int,
    fhat,
    family: SpectralFamily,
    theta0,
    taper: Taper | None = None,
) -> _WindowPrep:
    s = series.center()
    n = s.n
    k = n // b
    window_ords = subsample_periodograms(s, b, taper=taper)  # (T, N_b)
    f_tilde = window_ords.mean(axis=0)
    floor = POSITIVITY_FLOOR_RATIO * max(float(f_tilde.max()), np.finfo(float).tiny)
    u = window_ords / np.maximum(f_tilde, floor)
    # frequencies with no window mass carry no resampling variability; give
    # them the neutral unit ratio instead of 0/0
    dead = f_tilde <= 0.0
    if np.any(dead):
        u[:, dead] = 1.0
    lam_b = 2.0 * np.pi * np.arange(1, b // 2 + 1) / b
    fb = fhat(lam_b) if callable(fhat) else np.asarray(fhat, dtype=float)
    g = score_vector(family, theta0, lam_b)  # (m, N_b)
    v = 2.0 * g * fb  # weight two: each positive frequency stands for +-j
    A = u @ v.T  # (T, m)
    S = v.sum(axis=1)
    q = (u**2).mean(axis=0)
    return _WindowPrep(
        b=b,
        k=k,
        n_windows=window_ords.shape[0],
        score_sums=A,
        score_total=S,
        sq_ratio_mean=q,
        g_pos=g,
        fhat_b=fb,
    )


def convolved_m_plus(
    fhat,
    family: SpectralFamily,
    theta0,
    series: TimeSeries,
    b: int,
    k: int | None = None,
    rng: np.random.Generator | None = None,
    prep: _WindowPrep | None = None,
) -> np.ndarray:
    """One draw of the convolved-subsampling score vector M+.

    Draws k window indices uniformly with replacement and evaluates
    ``sqrt(k b) * mean_l (2 pi / b) sum_{j in G_b} g (I_b^{(l)} - fhat)`` with
    the resampled windows' rescaled periodograms.
    """
    if prep is None:
        prep = _window_prep(series, b, fhat, family, theta0)
    if k is None:
        k = prep.k
    if rng is None:
        rng = np.random.default_rng()
    idx = rng.integers(0, prep.n_windows, size=k)
    mean_scores = prep.score_sums[idx].mean(axis=0)
    return np.sqrt(k * b) * (2.0 * np.pi / b) * (mean_scores - prep.score_total)


def sigma_plus(
    fhat,
    family: SpectralFamily,
    theta0,
    series: TimeSeries,
    b: int,
    prep: _WindowPrep | None = None,
) -> np.ndarray:
    """Exact conditional variance of M+ (single pass over all windows).

    ``(4 pi^2 / b) sum_{j1, j2} g g^T fhat fhat [mean_t U_t(j1) U_t(j2) - 1]``
    computed as a covariance of the per-window weighted score sums.
    """
    if prep is None:
        prep = _window_prep(series, b, fhat, family, theta0)
    A = prep.score_sums
    S = prep.score_total
    second_moment = A.T @ A / A.shape[0]
    out = (4.0 * np.pi**2 / prep.b) * (second_moment - np.outer(S, S))
    return 0.5 * (out + out.T)


def c_plus(
    fhat,
    family: SpectralFamily,
    theta0,
    series: TimeSeries,
    b: int,
    prep: _WindowPrep | None = None,
) -> np.ndarray:
    """Diagonal-frequency correction matrix C+.

    ``(8 pi^2 / b) sum_{j in G_b} g_r g_s fhat^2 (mean_t U_t(j)^2 - 1)``.
    """
    if prep is None:
        prep = _window_prep(series, b, fhat, family, theta0)
    w = prep.fhat_b**2 * (prep.sq_ratio_mean - 1.0)
    out = (16.0 * np.pi**2 / prep.b) * ((prep.g_pos * w) @ prep.g_pos.T)
    return 0.5 * (out + out.T)


def v2_plus(sigma: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Fourth-order correction ``V2+ = Sigma+ - C+``, symmetrized."""
    sigma = np.asarray(sigma, dtype=float)
    c = np.asarray(c, dtype=float)
    if sigma.shape != c.shape:
        raise InvalidInputError("Sigma+ and C+ shapes differ")
    d = sigma - c
    return 0.5 * (d + d.T)


def assemble_l_star(ws, v1s, v2p, zs) -> np.ndarray:
    """Hybrid draw ``L* = (W*)^{-1} (V1* + V2+)^{1/2} Z*`` (PSD-projected root)."""
    ws = np.asarray(ws, dtype=float)
    cond = np.linalg.cond(ws)
    if not np.isfinite(cond) or cond > _MAX_COND:
        raise NumericError(f"W* numerically singular (condition number {cond:.3e})")
    total, _ = psd_project(np.asarray(v1s) + np.asarray(v2p))
    return np.linalg.solve(ws, psd_sqrt(total) @ np.asarray(zs, dtype=float))


def w_hat_star(v1s, sigma_star) -> np.ndarray:
    """Curvature estimate ``V1* (Sigma* V1*)^{-1/2}`` avoiding second derivatives.

    The square root of the (non-symmetric) product is the principal one,
    obtained by similarity through V1*^{1/2}; the result is symmetric PSD.
    """
    v1s = np.asarray(v1s, dtype=float)
    root = psd_sqrt(v1s)
    inner = root @ np.asarray(sigma_star, dtype=float) @ root
    return root @ psd_inv_sqrt(inner) @ root


# ---------------------------------------------------------------------------
# Gaussian pseudo series (tapered / boundary variants)
# ---------------------------------------------------------------------------


def gaussian_pseudo_series(fhat, n: int, rng: np.random.Generator) -> TimeSeries:
    """Gaussian pseudo time series whose periodogram ordinates center on fhat.

    Built by coloring the normalized transform of i.i.d. standard normals
    with ``fhat^{1/2}`` on the full Fourier grid; the result is real up to
    roundoff (asserted, then discarded).
    """
    eps = rng.standard_normal(n)
    lam_full = 2.0 * np.pi * np.arange(n) / n
    fvals = fhat(lam_full) if callable(fhat) else np.asarray(fhat, dtype=float)
    if np.any(fvals <= 0.0):
        raise InvalidInputError("spectral estimate must be positive")
    spec = np.fft.fft(eps) * np.sqrt(fvals)
    x = np.sqrt(2.0 * np.pi) * np.fft.ifft(spec)
    scale = max(float(np.max(np.abs(x.real))), 1.0)
    if float(np.max(np.abs(x.imag))) > 1e-10 * scale:
        raise NumericError("pseudo series has a non-negligible imaginary part")
    return TimeSeries(np.ascontiguousarray(x.real))


def tapered_pseudo_periodogram(xstar: TimeSeries, taper: Taper) -> Periodogram:
    """Tapered periodogram of the pseudo series (no mean adjustment)."""
    n = xstar.n
    if taper.n != n:
        raise InvalidInputError(
            f"taper length {taper.n} does not match series length {n}"
        )
    grid = fourier_grid(n)
    coef = np.fft.rfft(taper.weights * xstar.values)
    mag = np.abs(coef[1 : grid.N + 1]) ** 2
    return Periodogram(grid, mag / (2.0 * np.pi * taper.h2))


def _gaussian_tapered_v1_star(
    fhat, taper: Taper, family: SpectralFamily, theta0, grid: FourierGrid
) -> np.ndarray:
    """Exact Var* of the tapered multiplicative score sum.

    The tapered pseudo-periodogram ordinates are quadratic forms in the
    Gaussian draw: Isserlis gives
    ``Cov(I_j, I_k) = (|E J_j conj(J_k)|^2 + |E J_j J_k|^2) / (2 pi H_2)^2``.
    Writing ``J_T(lam_j) = sum_u q_j(u) eps_u``, the rows q_j are circular
    correlations of the coloring filter ``sqrt(2 pi) * ifft(sqrt(fhat))`` with
    the taper modulated to frequency j; the modulation shows up as a cyclic
    shift of fft(taper).  With the rectangular taper this collapses to
    independent Exp(1)-type ordinates and reproduces the standard closed form
    (up to the chi-square Nyquist ordinate when n is even).
    """
    n = grid.n
    N = grid.N
    lam_full = 2.0 * np.pi * np.arange(n) / n
    fvals = fhat(lam_full) if callable(fhat) else np.asarray(fhat, dtype=float)
    root_f = np.sqrt(np.asarray(fvals, dtype=float))
    fh = np.fft.fft(taper.weights.astype(complex))
    # q_j = ifft(fft(modulated taper) * conj(fft(filter))); fft(filter) = sqrt(fhat)
    Q = np.empty((N, n), dtype=complex)
    for j in range(1, N + 1):
        Q[j - 1] = np.fft.ifft(np.roll(fh, -j) * root_f)
    cross = Q @ np.conj(Q).T
    pseudo = Q @ Q.T
    # the sqrt(2 pi) filter factor and the 1/(2 pi H_2) ordinate normalization
    # combine into 1/H_2^2 on |..|^2 terms
    cov = (np.abs(cross) ** 2 + np.abs(pseudo) ** 2) / taper.h2**2
    g = score_vector(family, theta0, grid.lam_pos)
    return (16.0 * np.pi**2 / n) * (g @ cov @ g.T)


# ---------------------------------------------------------------------------
# full sessions
# ---------------------------------------------------------------------------


def _rep_rng(seed: int, rep: int, attempt: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=(seed, rep, attempt)))


def _session_common(config: BootstrapConfig, data_pg: Periodogram):
    """Smoothed spectrum shared by every pipeline variant."""
    h_bw = config.bandwidth if config.bandwidth is not None else cv_bandwidth(data_pg)
    fhat = kernel_spectral_estimate(data_pg, h_bw)
    return fhat, h_bw


def run_hybrid_bootstrap(
    series: TimeSeries, family: SpectralFamily, config: BootstrapConfig
) -> tuple[BootstrapComponents, BootstrapDistribution]:
    """Full standard session; deterministic given (series, family, config)."""
    if config.variant != "standard":
        raise InvalidInputError("run_hybrid_bootstrap handles the standard variant only")
    return _run_session(series, family, config)


def run_variant_bootstrap(
    series: TimeSeries, family: SpectralFamily, config: BootstrapConfig
) -> tuple[BootstrapComponents, BootstrapDistribution]:
    """Tapered / debiased / boundary-corrected session."""
    if config.variant == "standard":
        raise InvalidInputError("use run_hybrid_bootstrap for the standard variant")
    return _run_session(series, family, config)


def _run_session(series: TimeSeries, family: SpectralFamily, config: BootstrapConfig):
    s = series.center()
    n = s.n
    grid = fourier_grid(n)
    b = config.resolve_b(n)
    variant = config.variant

    data_pg = periodogram(s)
    taper = None
    taper_b = None
    if variant == "tapered":
        taper = taper_weights("tukey", n, rho=config.taper_rho)
        taper_b = taper_weights("tukey", b, rho=config.taper_rho)
        data_spec = tapered_periodogram(s, taper)
    elif variant == "boundary":
        p = (
            config.boundary_p
            if config.boundary_p is not None
            else select_ar_order_aic(s)
        )
        yw_data = yule_walker(s, p)
        _, j_tilde = boundary_extension_dft(s, yw_data, grid)
        j_data = dft(s)
        bc_vals = np.real(j_tilde * np.conj(j_data))[1:] / (2.0 * np.pi * n)
        data_spec = bc_vals
    else:
        data_spec = data_pg

    # smoothed spectrum: smooth whichever periodogram the variant estimates with
    smoothing_pg = data_spec if variant == "tapered" else data_pg
    fhat, h_bw = _session_common(config, smoothing_pg)
    fhat_grid = fhat(grid.lam_pos)

    fit_family = debiased_family(family, n) if variant == "debiased" else family

    theta_hat_est = minimize_whittle(fit_family, data_spec, grid)
    theta0_est = pseudo_true_parameter(
        fit_family, fhat_grid, grid,
        theta_init=theta_hat_est.theta if theta_hat_est.converged else None,
    )
    if not theta0_est.converged:
        raise NumericError("centering minimization did not converge")
    theta0 = theta0_est.theta

    # convolved part: scores of the fitting family at theta0, windows per variant
    prep = _window_prep(s, b, fhat, fit_family, theta0, taper=taper_b)
    sig_p = sigma_plus(fhat, fit_family, theta0, s, b, prep=prep)
    c_p = c_plus(fhat, fit_family, theta0, s, b, prep=prep)
    v2p = v2_plus(sig_p, c_p)

    if variant == "tapered":
        v1s = _gaussian_tapered_v1_star(fhat, taper, fit_family, theta0, grid)
    elif variant == "boundary":
        v1s = None  # empirical: no closed form once the AR refit enters
    else:
        v1s = v1_star(fhat_grid, fit_family, theta0, grid)

    B = config.B
    m = family.m
    g_pos = score_vector(fit_family, theta0, grid.lam_pos)

    theta_stars = np.empty((B, m))
    w_stars = np.empty((B, m, m))
    m_stars = np.empty((B, m)) if variant == "boundary" else None
    discarded = 0
    max_discard = max(1, int(np.ceil(config.max_discard_frac * B)))

    for rep in range(B):
        for attempt in range(50):
            rng = _rep_rng(config.seed, rep, attempt)
            if variant == "tapered":
                xstar = gaussian_pseudo_series(fhat, n, rng)
                spec_star = tapered_pseudo_periodogram(xstar, taper).ordinates
            elif variant == "boundary":
                xstar = gaussian_pseudo_series(fhat, n, rng)
                yw_star = yule_walker(xstar, yw_data.p)
                xs = xstar.center()
                _, j_tilde_star = boundary_extension_dft(xs, yw_star, grid)
                j_star = dft(xs)
                spec_star = np.real(j_tilde_star * np.conj(j_star))[1:] / (
                    2.0 * np.pi * n
                )
            else:
                spec_star = mult_pseudo_periodogram(fhat_grid, rng)
            est = minimize_whittle(
                fit_family, spec_star, grid, theta_init=theta0, multistart=False
            )
            if est.converged:
                break
            discarded += 1
            if discarded > max_discard:
                raise NumericError(
                    f"more than {config.max_discard_frac:.0%} of replicates failed to converge"
                )
        else:
            raise NumericError(f"replicate {rep} failed to converge after 50 attempts")
        theta_stars[rep] = est.theta
        w_stars[rep] = whittle_hessian(theta0, spec_star, fit_family, grid)
        if m_stars is not None:
            m_stars[rep] = (4.0 * np.pi / np.sqrt(n)) * (
                g_pos @ (spec_star - fhat_grid)
            )

    if v1s is None:
        centered = m_stars - m_stars.mean(axis=0)
        v1s = centered.T @ centered / B
        v1s = 0.5 * (v1s + v1s.T)

    eigvals = np.linalg.eigvalsh(v1s)
    if eigvals.min() <= 1e-10 * max(np.trace(v1s), np.finfo(float).tiny):
        raise NumericError(
            f"V1* ill-conditioned: min eigenvalue {eigvals.min():.3e} vs trace {np.trace(v1s):.3e}"
        )

    root_n_centered = np.sqrt(n) * (theta_stars - theta0)
    v1_inv_root = psd_inv_sqrt(v1s)
    total, clamped_mass = psd_project(v1s + v2p)
    total_root = psd_sqrt(total)

    z_samples = np.empty((B, m))
    l_samples = np.empty((B, m))
    max_cond = 0.0
    for rep in range(B):
        ws = w_stars[rep]
        cond = float(np.linalg.cond(ws))
        max_cond = max(max_cond, cond)
        if not np.isfinite(cond) or cond > _MAX_COND:
            raise NumericError(f"replicate {rep}: W* condition number {cond:.3e}")
        z = v1_inv_root @ (ws @ root_n_centered[rep])
        z_samples[rep] = z
        l_samples[rep] = np.linalg.solve(ws, total_root @ z)

    diagnostics = {
        "n": n,
        "b": b,
        "b3_over_n": b**3 / n,
        "bandwidth": h_bw,
        "B": B,
        "variant": variant,
        "discarded_replicates": discarded,
        "psd_clamped_mass": clamped_mass,
        "max_w_star_cond": max_cond,
        "theta_hat_converged": bool(theta_hat_est.converged),
    }
    if variant == "tapered":
        diagnostics["taper_rho"] = config.taper_rho
    if variant == "boundary":
        diagnostics["boundary_p"] = yw_data.p

    components = BootstrapComponents(
        theta0=theta0,
        theta_hat=theta_hat_est.theta,
        w_star_mean=w_stars.mean(axis=0),
        v1_star=v1s,
        sigma_plus=sig_p,
        c_plus=c_p,
        v2_plus=v2p,
        z_samples=z_samples,
        root_n_centered=root_n_centered,
        fhat=fhat,
        diagnostics=diagnostics,
    )
    return components, BootstrapDistribution(l_samples)
