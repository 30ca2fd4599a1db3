"""Frequency-domain objectives, their minimizers, and likelihood variants.

The core objective for a sample of size n with spectrum values ``s_j`` on the
symmetric grid G_n is

    D_n(theta, s) = (1/n) * sum_{j in G_n} { log f_theta(lam_j) + s_j / f_theta(lam_j) }

evaluated here on the positive half-grid with weight two.  ``s`` may be a
periodogram, a pseudo-periodogram, a nonparametric density estimate on the
grid, or a boundary-corrected periodogram (whose real part can be slightly
negative).

Variants:

* debiased: ``f_theta`` is replaced by its expectation under finite-sample
  blurring, i.e. the convolution with the Fejer kernel (computed through the
  triangular-weighted autocovariances of ``f_theta``);
* boundary-corrected: the periodogram is replaced by
  ``Re[(J + J_ext) conj(J)] / (2 pi n)`` where ``J_ext`` extends the sample
  beyond both ends with best linear AR(p) predictions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import InvalidInputError, NumericError
from .families import SpectralFamily, WhiteNoiseFamily, _levinson
from .spectral import FourierGrid, Periodogram, TimeSeries, dft

__all__ = [
    "ParamEstimate",
    "YuleWalkerFit",
    "whittle_objective",
    "whittle_score",
    "whittle_hessian",
    "minimize_whittle",
    "ar1_closed_form",
    "pseudo_true_parameter",
    "score_vector",
    "fejer_kernel",
    "debiased_expected_spectrum",
    "debiased_family",
    "DebiasedFamily",
    "debiased_objective",
    "yule_walker",
    "boundary_extension_dft",
    "boundary_periodogram",
    "select_ar_order_aic",
]

_BARRIER = 1e12


@dataclass(frozen=True)
class ParamEstimate:
    """Result of a frequency-domain minimization."""

    theta: np.ndarray
    objective: float
    converged: bool
    iterations: int
    message: str = ""


def _spec_values(spec) -> np.ndarray:
    if isinstance(spec, Periodogram):
        return spec.ordinates
    return np.asarray(spec, dtype=float)


def whittle_objective(theta, spec, family: SpectralFamily, grid: FourierGrid) -> float:
    """D_n(theta, spec) over G_n (positive half-grid with weight two)."""
    theta = np.asarray(theta, dtype=float)
    if not family.valid(theta):
        raise InvalidInputError(f"theta {theta} outside the admissible parameter set")
    s = _spec_values(spec)
    lam = grid.lam_pos
    val = np.sum(family.log_f(theta, lam) + s * family.inv_f(theta, lam))
    return float(2.0 * val / grid.n)


def whittle_score(theta, spec, family: SpectralFamily, grid: FourierGrid) -> np.ndarray:
    """Gradient of D_n in theta; shape (m,)."""
    theta = np.asarray(theta, dtype=float)
    s = _spec_values(spec)
    lam = grid.lam_pos
    terms = family.d_log_f(theta, lam) + s * family.d_inv_f(theta, lam)
    return 2.0 * terms.sum(axis=-1) / grid.n


def whittle_hessian(theta, spec, family: SpectralFamily, grid: FourierGrid) -> np.ndarray:
    """Hessian of D_n in theta; shape (m, m)."""
    theta = np.asarray(theta, dtype=float)
    s = _spec_values(spec)
    lam = grid.lam_pos
    terms = family.d2_log_f(theta, lam) + s * family.d2_inv_f(theta, lam)
    return 2.0 * terms.sum(axis=-1) / grid.n


def _objective_and_grad(u, s, family, lam, n):
    """Objective and gradient in the family's internal coordinates."""
    theta = family.from_internal(u)
    if not family.valid(theta):
        return _BARRIER * (1.0 + float(np.sum(np.asarray(u) ** 2))), np.zeros(family.m)
    logf = family.log_f(theta, lam)
    invf = family.inv_f(theta, lam)
    val = 2.0 * float(np.sum(logf + s * invf)) / n
    if not np.isfinite(val):
        return _BARRIER, np.zeros(family.m)
    terms = family.d_log_f(theta, lam) + s * family.d_inv_f(theta, lam)
    grad = 2.0 * terms.sum(axis=-1) / n
    return val, family.grad_to_internal(theta, grad)


def _score_ok(theta, s, family, lam, n) -> bool:
    terms = family.d_log_f(theta, lam) + s * family.d_inv_f(theta, lam)
    score = 2.0 * terms.sum(axis=-1) / n
    return float(np.linalg.norm(score)) <= 1e-6 * (1.0 + float(np.linalg.norm(theta)))


def minimize_whittle(
    family: SpectralFamily,
    spec,
    grid: FourierGrid,
    theta_init=None,
    multistart: bool = True,
) -> ParamEstimate:
    """Minimize D_n(., spec) over the family's box by projected quasi-Newton.

    Runs L-BFGS-B with analytic gradients from a deterministic list of starts
    (the supplied start, a moment-implied fit and the box-center default),
    falling back to Nelder-Mead when the gradient path stalls.  Non-convergence
    is reported through the ``converged`` flag rather than an exception.
    """
    s = _spec_values(spec)
    lam = grid.lam_pos
    n = grid.n

    starts: list[np.ndarray] = []
    if theta_init is not None:
        t0 = np.asarray(theta_init, dtype=float)
        if not family.valid(t0):
            raise InvalidInputError(f"theta_init {t0} outside the admissible set")
        starts.append(t0)
    if multistart or not starts:
        for cand in family.default_starts(s, lam, n):
            if not any(np.allclose(cand, prev) for prev in starts):
                starts.append(np.asarray(cand, dtype=float))

    bounds = family.internal_bounds()
    best = None
    total_iter = 0
    for start in starts:
        res = optimize.minimize(
            _objective_and_grad,
            family.to_internal(start),
            args=(s, family, lam, n),
            method="L-BFGS-B",
            jac=True,
            bounds=bounds,
            options={"maxiter": 300, "ftol": 1e-14, "gtol": 1e-10},
        )
        total_iter += int(res.nit)
        if best is None or res.fun < best.fun:
            best = res
    assert best is not None

    def _is_converged(t):
        return (
            family.valid(t)
            and family.interior(t)
            and _score_ok(t, s, family, lam, n)
        )

    theta_hat = family.clip_to_box(family.from_internal(best.x))
    converged = _is_converged(theta_hat)
    if not converged:
        # gradient path stalled; polish with a simplex search
        res = optimize.minimize(
            lambda u: _objective_and_grad(u, s, family, lam, n)[0],
            family.to_internal(theta_hat),
            method="Nelder-Mead",
            options={"maxiter": 4000, "xatol": 1e-12, "fatol": 1e-15},
        )
        total_iter += int(res.nit)
        cand = family.clip_to_box(family.from_internal(res.x))
        if family.valid(cand) and res.fun <= best.fun:
            theta_hat = cand
            best = res
        converged = _is_converged(theta_hat)

    obj = whittle_objective(theta_hat, s, family, grid) if family.valid(theta_hat) else np.inf
    return ParamEstimate(
        theta=theta_hat,
        objective=float(obj),
        converged=bool(converged),
        iterations=total_iter,
        message=str(getattr(best, "message", "")),
    )


def ar1_closed_form(I: Periodogram) -> float:
    """First-order coefficient estimate ``sum_j I_j cos(lam_j) / sum_j I_j``."""
    total = float(np.sum(I.ordinates))
    if total <= 0.0:
        raise InvalidInputError("periodogram has no mass; AR(1) ratio undefined")
    return float(np.sum(I.ordinates * np.cos(I.grid.lam_pos)) / total)


def pseudo_true_parameter(
    family: SpectralFamily, fhat, grid: FourierGrid, theta_init=None
) -> ParamEstimate:
    """Centering parameter: minimizer of D_n(theta, fhat) on the full grid."""
    fvals = fhat(grid.lam_pos) if callable(fhat) else np.asarray(fhat, dtype=float)
    return minimize_whittle(family, fvals, grid, theta_init=theta_init)


def score_vector(family: SpectralFamily, theta, lam) -> np.ndarray:
    """Score ``g_theta(lam) = -(1/(2 pi)) d/dtheta (1/f_theta)(lam)``; shape (m, L)."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    return -family.d_inv_f(np.asarray(theta, dtype=float), lam) / (2.0 * np.pi)


# ---------------------------------------------------------------------------
# Debiased objective: Fejer-kernel expectation smoothing
# ---------------------------------------------------------------------------


def fejer_kernel(n: int, x):
    """Fejer kernel ``K_n(x) = sin^2(nx/2) / (2 pi n sin^2(x/2))`` with K_n(0) = n/(2 pi).

    Evaluated 2*pi-periodically; removable singularities at multiples of 2*pi
    take the value n/(2*pi).
    """
    if n < 1:
        raise InvalidInputError("kernel order must be >= 1")
    y = np.mod(np.asarray(x, dtype=float), 2.0 * np.pi)
    y = np.where(y > np.pi, y - 2.0 * np.pi, y)
    sin_half = np.sin(y / 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.sin(n * y / 2.0) ** 2 / (2.0 * np.pi * n * sin_half**2)
    out = np.where(y == 0.0, n / (2.0 * np.pi), val)
    if np.ndim(x) == 0:
        return float(out)
    return out


class _FejerSmoother:
    """Applies Fejer-kernel smoothing to a family's density and derivatives.

    The convolution ``int K_n(w - lam) u(w) dw`` equals the triangular-weighted
    cosine series of the autocovariance coefficients of ``u``; the coefficients
    are computed by FFT quadrature on a fine grid (aliasing error is
    negligible for smooth spectra).
    """

    def __init__(self, n: int, lam: np.ndarray, quad_points: int | None = None):
        self.n = int(n)
        lam = np.asarray(lam, dtype=float)
        M = quad_points or max(8 * self.n, 1024)
        self.M = int(2 ** int(np.ceil(np.log2(M))))
        self.quad = 2.0 * np.pi * np.arange(self.M) / self.M
        h = np.arange(self.n)
        tri = 1.0 - h / self.n
        # combined weights for the cosine-series reconstruction
        coef_w = tri / np.pi
        coef_w[0] = 1.0 / (2.0 * np.pi)
        self._coef_w = coef_w
        self._cos = np.cos(np.outer(lam, h))  # (L, n)

    def smooth(self, vals: np.ndarray) -> np.ndarray:
        """Smooth function samples on the quadrature grid; vals shape (..., M)."""
        gamma = 2.0 * np.pi * np.real(np.fft.ifft(vals, axis=-1))[..., : self.n]
        return (gamma * self._coef_w) @ self._cos.T


class DebiasedFamily(SpectralFamily):
    """View of a family with ``f_theta`` replaced by its blurred expectation.

    Shares parameter dimension, box and validity with the base family, so it
    plugs into the same objective/score/Hessian machinery.
    """

    def __init__(self, base: SpectralFamily, n: int):
        self.base = base
        self.n = int(n)
        self.m = base.m
        self.lower = base.lower
        self.upper = base.upper
        self.name = f"debiased-{base.name}"
        self._smoothers: dict[bytes, _FejerSmoother] = {}
        self._cache: tuple | None = None

    def valid(self, theta):
        return self.base.valid(theta)

    def default_starts(self, spec, lam, n):
        return self.base.default_starts(spec, lam, n)

    def _smoother(self, lam: np.ndarray) -> _FejerSmoother:
        key = lam.tobytes()
        sm = self._smoothers.get(key)
        if sm is None:
            sm = _FejerSmoother(self.n, lam)
            self._smoothers[key] = sm
        return sm

    def _blurred(self, theta, lam):
        """(fbar, dfbar, d2fbar) at lam, cached for repeated same-point calls."""
        theta = np.asarray(theta, dtype=float)
        lam = np.asarray(lam, dtype=float)
        if self._cache is not None:
            c_theta, c_lam, out = self._cache
            same_lam = c_lam is lam or (
                c_lam.shape == lam.shape and np.array_equal(c_lam, lam)
            )
            if c_theta.shape == theta.shape and np.array_equal(c_theta, theta) and same_lam:
                return out
        sm = self._smoother(lam)
        f_q, df_q, d2f_q = self.base.f_derivs(theta, sm.quad)
        fbar = sm.smooth(f_q)
        dfbar = sm.smooth(df_q)
        d2fbar = sm.smooth(d2f_q)
        out = (fbar, dfbar, d2fbar)
        self._cache = (theta.copy(), lam, out)
        return out

    def f(self, theta, lam):
        return self._blurred(theta, lam)[0]

    def log_f(self, theta, lam):
        return np.log(self._blurred(theta, lam)[0])

    def inv_f(self, theta, lam):
        return 1.0 / self._blurred(theta, lam)[0]

    def d_log_f(self, theta, lam):
        fbar, dfbar, _ = self._blurred(theta, lam)
        return dfbar / fbar

    def d2_log_f(self, theta, lam):
        fbar, dfbar, d2fbar = self._blurred(theta, lam)
        return d2fbar / fbar - dfbar[:, None, :] * dfbar[None, :, :] / fbar**2

    def d_inv_f(self, theta, lam):
        fbar, dfbar, _ = self._blurred(theta, lam)
        return -dfbar / fbar**2

    def d2_inv_f(self, theta, lam):
        fbar, dfbar, d2fbar = self._blurred(theta, lam)
        return (
            2.0 * dfbar[:, None, :] * dfbar[None, :, :] / fbar**3
            - d2fbar / fbar**2
        )


def debiased_family(family: SpectralFamily, n: int) -> SpectralFamily:
    """Blurred view of ``family`` for sample size ``n``.

    Constant densities are invariant under convolution with a unit-mass
    kernel, so the white-noise family is returned unchanged.
    """
    if isinstance(family, WhiteNoiseFamily):
        return family
    return DebiasedFamily(family, n)


def debiased_expected_spectrum(family: SpectralFamily, theta, n: int, lam) -> np.ndarray:
    """Blurred density values: the Fejer convolution of f_theta at ``lam``."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    fam = debiased_family(family, n)
    if fam is family:
        return family.f(np.asarray(theta, dtype=float), lam)
    return fam.f(np.asarray(theta, dtype=float), lam)


def debiased_objective(theta, spec, family: SpectralFamily, grid: FourierGrid) -> float:
    """D_n with the blurred parametric density in place of f_theta."""
    return whittle_objective(theta, spec, debiased_family(family, grid.n), grid)


# ---------------------------------------------------------------------------
# Yule-Walker fitting and the boundary-extended transform
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class YuleWalkerFit:
    """AR(p) fit by Yule-Walker on biased sample autocovariances."""

    p: int
    coefficients: np.ndarray
    innovation_variance: float
    autocovariances: np.ndarray

    def phi_poly(self, lam) -> np.ndarray:
        """``phi(lam) = 1 - sum_s phi_s e^{-i s lam}``."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        if self.p == 0:
            return np.ones(lam.shape, dtype=complex)
        s = np.arange(1, self.p + 1)
        return 1.0 - self.coefficients @ np.exp(-1j * np.outer(s, lam))


def yule_walker(series: TimeSeries, p: int) -> YuleWalkerFit:
    """Fit an AR(p) by solving the Toeplitz system with biased autocovariances."""
    s = series.center()
    n = s.n
    if p < 0 or p >= n / 2:
        raise InvalidInputError(f"AR order must satisfy 0 <= p < n/2, got {p}")
    x = s.values
    gam = np.array([float(x[: n - h] @ x[h:]) / n for h in range(p + 1)])
    if gam[0] <= 0:
        raise NumericError("degenerate series: zero variance")
    phi, sig2 = _levinson(gam, p)
    if not np.isfinite(sig2) or sig2 <= 0:
        raise NumericError("Yule-Walker system numerically singular")
    return YuleWalkerFit(p, phi, float(sig2), gam)


def select_ar_order_aic(series: TimeSeries, p_max: int | None = None) -> int:
    """AIC order selection over 0..p_max using Yule-Walker innovation variances."""
    s = series.center()
    n = s.n
    if p_max is None:
        p_max = min(10 * int(np.log10(n)), n // 2 - 1)
    best_p, best_aic = 0, np.inf
    for p in range(p_max + 1):
        fit = yule_walker(s, p)
        aic = n * np.log(fit.innovation_variance) + 2.0 * p
        if aic < best_aic:
            best_p, best_aic = p, aic
    return best_p


def boundary_extension_dft(series: TimeSeries, ywfit: YuleWalkerFit, grid: FourierGrid):
    """DFT of the AR(p)-predicted sample extension, and the completed transform.

    Returns ``(J_ext, J_tilde)`` at j = 0..N where ``J_ext`` is the transform
    contribution of the infinite sequence of best linear predictions beyond
    both sample ends (geometric sums in closed form) and
    ``J_tilde = J + J_ext``.  The closed form, with
    ``phi(lam) = 1 - sum_s phi_s e^{-i s lam}`` and the same ``e^{-i lam t}``
    transform convention as :func:`whittleboot.spectral.dft`:

        J_ext(lam) = conj(phi(lam))^{-1} sum_l X_l sum_{s=0}^{p-l} phi_{l+s} e^{+i s lam}
                   + e^{-i n lam} phi(lam)^{-1} sum_l X_{n+1-l} sum_{s=0}^{p-l} phi_{l+s} e^{-i (s+1) lam}
    """
    s = series.center()
    n = s.n
    if grid.n != n:
        raise InvalidInputError("grid does not match series length")
    J = dft(s)
    p = ywfit.p
    if p == 0:
        return np.zeros_like(J), J.copy()
    lam = 2.0 * np.pi * np.arange(grid.N + 1) / n
    phi = ywfit.phi_poly(lam)
    coeffs = ywfit.coefficients
    x = s.values
    # inner polynomials c_l(lam) = sum_{s=0}^{p-l} phi_{l+s} e^{-i s lam}
    front = np.zeros(lam.shape, dtype=complex)
    back = np.zeros(lam.shape, dtype=complex)
    e_neg = np.exp(-1j * lam)
    for ell in range(1, p + 1):
        smax = p - ell
        c = np.zeros(lam.shape, dtype=complex)
        for sdx in range(smax + 1):
            c = c + coeffs[ell + sdx - 1] * e_neg ** sdx
        front += x[ell - 1] * np.conj(c)          # uses e^{+i s lam}
        back += x[n - ell] * c * e_neg            # extra e^{-i lam}
    J_ext = front / np.conj(phi) + np.exp(-1j * n * lam) * back / phi
    return J_ext, J + J_ext


def boundary_periodogram(series: TimeSeries, ywfit: YuleWalkerFit):
    """Boundary-corrected periodogram ``(2 pi n)^{-1} J_tilde(lam) conj(J(lam))``.

    Returns ``(real_ordinates, complex_values)`` on j = 1..N.  The real part
    feeds the objective; the complex values are kept for diagnostics (the
    imaginary parts vanish only asymptotically).
    """
    s = series.center()
    grid = FourierGrid(s.n)
    J = dft(s)
    _, J_tilde = boundary_extension_dft(s, ywfit, grid)
    complex_vals = (J_tilde * np.conj(J))[1:] / (2.0 * np.pi * s.n)
    return np.real(complex_vals), complex_vals
