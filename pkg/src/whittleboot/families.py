"""Parametric spectral density families.

A family exposes the density ``f_theta`` together with the first and second
derivatives (in theta) of both ``log f_theta`` and ``1/f_theta``, which is
exactly what the frequency-domain objective, its score and its Hessian
consume.  Families also report a box constraint and an extra validity
predicate (e.g. the AR stationarity region).

Derivative array conventions for a frequency array of length L:
``d_*`` has shape (m, L) and ``d2_*`` has shape (m, m, L).
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

__all__ = ["SpectralFamily", "WhiteNoiseFamily", "ARFamily"]

# Reject AR parameters whose characteristic polynomial has a root with
# modulus below this margin (stationarity barrier).
AR_ROOT_MARGIN = 1.001


class SpectralFamily:
    """Base class: a parametric family {f_theta} on [-pi, pi].

    Subclasses implement the evaluation methods; optimization code only uses
    this interface.  ``log_coords`` lists coordinates (scale parameters) that
    optimizers should traverse on the log scale.
    """

    m: int
    lower: np.ndarray
    upper: np.ndarray
    name: str = "family"
    log_coords: tuple = ()

    def to_internal(self, theta) -> np.ndarray:
        u = np.array(theta, dtype=float)
        for i in self.log_coords:
            u[i] = np.log(u[i])
        return u

    def from_internal(self, u) -> np.ndarray:
        theta = np.array(u, dtype=float)
        for i in self.log_coords:
            theta[i] = np.exp(theta[i])
        return theta

    def internal_bounds(self) -> list:
        lo = np.array(self.lower, dtype=float)
        hi = np.array(self.upper, dtype=float)
        for i in self.log_coords:
            lo[i] = max(lo[i], 1e-300)
            hi[i] = min(hi[i], 1e300)
        return list(zip(self.to_internal(lo), self.to_internal(hi)))

    def grad_to_internal(self, theta, grad) -> np.ndarray:
        """Chain rule d/du from d/dtheta for the internal coordinates."""
        g = np.array(grad, dtype=float)
        for i in self.log_coords:
            g[i] *= theta[i]
        return g

    def in_box(self, theta) -> bool:
        theta = np.asarray(theta, dtype=float)
        return bool(np.all(theta >= self.lower) and np.all(theta <= self.upper))

    def valid(self, theta) -> bool:
        """Parameter admissible (box plus any extra region constraint)."""
        return self.in_box(theta)

    def interior(self, theta, rel: float = 1e-6) -> bool:
        """Strictly inside the box: clear of each bound at the parameter's own scale."""
        theta = np.asarray(theta, dtype=float)
        pad = rel * (1.0 + np.abs(theta))
        return bool(np.all(theta > self.lower + pad) and np.all(theta < self.upper - pad))

    def clip_to_box(self, theta) -> np.ndarray:
        return np.clip(np.asarray(theta, dtype=float), self.lower, self.upper)

    # evaluation interface -------------------------------------------------
    def f(self, theta, lam) -> np.ndarray:
        raise NotImplementedError

    def log_f(self, theta, lam) -> np.ndarray:
        return np.log(self.f(theta, lam))

    def inv_f(self, theta, lam) -> np.ndarray:
        return 1.0 / self.f(theta, lam)

    def d_log_f(self, theta, lam) -> np.ndarray:
        raise NotImplementedError

    def d2_log_f(self, theta, lam) -> np.ndarray:
        raise NotImplementedError

    def d_inv_f(self, theta, lam) -> np.ndarray:
        raise NotImplementedError

    def d2_inv_f(self, theta, lam) -> np.ndarray:
        raise NotImplementedError

    def f_derivs(self, theta, lam):
        """(f, df, d2f) in theta; used by the expectation-smoothing machinery."""
        raise NotImplementedError

    def default_starts(self, spec, lam, n) -> list:
        """Deterministic list of starting points for the optimizer."""
        raise NotImplementedError


class WhiteNoiseFamily(SpectralFamily):
    """Flat spectra ``f(lam) = sigma2 / (2 pi)`` with theta = (sigma2,)."""

    name = "white"
    log_coords = (0,)

    def __init__(self, sigma2_bounds=(1e-12, 1e12)):
        self.m = 1
        self.lower = np.array([sigma2_bounds[0]])
        self.upper = np.array([sigma2_bounds[1]])

    def f(self, theta, lam):
        lam = np.asarray(lam, dtype=float)
        return np.full(lam.shape, theta[0] / (2.0 * np.pi))

    def log_f(self, theta, lam):
        lam = np.asarray(lam, dtype=float)
        return np.full(lam.shape, np.log(theta[0] / (2.0 * np.pi)))

    def inv_f(self, theta, lam):
        lam = np.asarray(lam, dtype=float)
        return np.full(lam.shape, 2.0 * np.pi / theta[0])

    def d_log_f(self, theta, lam):
        lam = np.asarray(lam, dtype=float)
        return np.full((1,) + lam.shape, 1.0 / theta[0])

    def d2_log_f(self, theta, lam):
        lam = np.asarray(lam, dtype=float)
        return np.full((1, 1) + lam.shape, -1.0 / theta[0] ** 2)

    def d_inv_f(self, theta, lam):
        lam = np.asarray(lam, dtype=float)
        return np.full((1,) + lam.shape, -2.0 * np.pi / theta[0] ** 2)

    def d2_inv_f(self, theta, lam):
        lam = np.asarray(lam, dtype=float)
        return np.full((1, 1) + lam.shape, 4.0 * np.pi / theta[0] ** 3)

    def f_derivs(self, theta, lam):
        lam = np.asarray(lam, dtype=float)
        f = self.f(theta, lam)
        df = np.full((1,) + lam.shape, 1.0 / (2.0 * np.pi))
        d2f = np.zeros((1, 1) + lam.shape)
        return f, df, d2f

    def default_starts(self, spec, lam, n):
        return [np.array([max(2.0 * np.pi * float(np.mean(spec)), self.lower[0] * 2)])]


class ARFamily(SpectralFamily):
    """Autoregressive spectra of order p.

    ``theta = (sigma2, a_1, ..., a_p)`` and
    ``f_theta(lam) = sigma2 / (2 pi) * |1 - sum_k a_k e^{-i k lam}|^{-2}``.
    Validity requires the roots of the AR polynomial to lie outside the
    closed disc of radius AR_ROOT_MARGIN; the coordinate box
    ``|a_k| <= binom(p, k)`` is the tightest box containing that region.
    """

    log_coords = (0,)

    def __init__(self, p: int, sigma2_bounds=(1e-12, 1e12)):
        if p < 1:
            raise InvalidInputError("AR order must be >= 1 (use WhiteNoiseFamily for p = 0)")
        self.p = int(p)
        self.m = self.p + 1
        self.name = f"ar{p}"
        from math import comb

        coef_bounds = np.array([float(comb(self.p, k)) for k in range(1, self.p + 1)])
        self.lower = np.concatenate(([sigma2_bounds[0]], -coef_bounds))
        self.upper = np.concatenate(([sigma2_bounds[1]], coef_bounds))

    def valid(self, theta) -> bool:
        if not self.in_box(theta):
            return False
        a = np.asarray(theta[1:], dtype=float)
        if not np.any(a):
            return True
        roots = np.roots(np.concatenate(([1.0], -a))[::-1])
        if roots.size == 0:
            return True
        return bool(np.min(np.abs(roots)) > AR_ROOT_MARGIN)

    # --- internals ---------------------------------------------------------
    def _phi(self, theta, lam):
        """phi(lam) = 1 - sum_k a_k e^{-i k lam}, plus the e^{-i k lam} basis."""
        lam = np.asarray(lam, dtype=float)
        k = np.arange(1, self.p + 1)
        basis = np.exp(-1j * np.outer(k, lam))  # (p, L)
        phi = 1.0 - np.asarray(theta[1:], dtype=float) @ basis
        return phi, basis

    def _a_quad(self, theta, lam):
        """A = |phi|^2 and its a-derivatives dA (p, L), d2A (p, p, L)."""
        lam = np.asarray(lam, dtype=float)
        phi, basis = self._phi(theta, lam)
        A = np.abs(phi) ** 2
        dA = -2.0 * np.real(np.conj(phi)[None, :] * basis)
        k = np.arange(1, self.p + 1)
        diff = k[:, None] - k[None, :]
        d2A = 2.0 * np.cos(diff[:, :, None] * lam[None, None, :])
        return A, dA, d2A

    # --- interface ----------------------------------------------------------
    def f(self, theta, lam):
        phi, _ = self._phi(theta, lam)
        return theta[0] / (2.0 * np.pi) / np.abs(phi) ** 2

    def log_f(self, theta, lam):
        phi, _ = self._phi(theta, lam)
        return np.log(theta[0] / (2.0 * np.pi)) - np.log(np.abs(phi) ** 2)

    def inv_f(self, theta, lam):
        phi, _ = self._phi(theta, lam)
        return 2.0 * np.pi / theta[0] * np.abs(phi) ** 2

    def d_log_f(self, theta, lam):
        A, dA, _ = self._a_quad(theta, lam)
        out = np.empty((self.m,) + A.shape)
        out[0] = 1.0 / theta[0]
        out[1:] = -dA / A
        return out

    def d2_log_f(self, theta, lam):
        A, dA, d2A = self._a_quad(theta, lam)
        out = np.zeros((self.m, self.m) + A.shape)
        out[0, 0] = -1.0 / theta[0] ** 2
        out[1:, 1:] = -d2A / A + dA[:, None, :] * dA[None, :, :] / A**2
        return out

    def d_inv_f(self, theta, lam):
        A, dA, _ = self._a_quad(theta, lam)
        s2 = theta[0]
        out = np.empty((self.m,) + A.shape)
        out[0] = -2.0 * np.pi * A / s2**2
        out[1:] = (2.0 * np.pi / s2) * dA
        return out

    def d2_inv_f(self, theta, lam):
        A, dA, d2A = self._a_quad(theta, lam)
        s2 = theta[0]
        out = np.empty((self.m, self.m) + A.shape)
        out[0, 0] = 4.0 * np.pi * A / s2**3
        out[0, 1:] = out[1:, 0] = -(2.0 * np.pi / s2**2) * dA
        out[1:, 1:] = (2.0 * np.pi / s2) * d2A
        return out

    def f_derivs(self, theta, lam):
        A, dA, d2A = self._a_quad(theta, lam)
        s2 = theta[0]
        f = s2 / (2.0 * np.pi) / A
        df = np.empty((self.m,) + A.shape)
        df[0] = f / s2
        df[1:] = -f * dA / A
        d2f = np.empty((self.m, self.m) + A.shape)
        d2f[0, 0] = 0.0
        d2f[0, 1:] = d2f[1:, 0] = -f / s2 * dA / A
        d2f[1:, 1:] = f * (
            2.0 * dA[:, None, :] * dA[None, :, :] / A**2 - d2A / A
        )
        return f, df, d2f

    def autocovariances(self, theta, lam_check=None) -> np.ndarray:
        """First p+1 autocovariances of the AR process (gamma_0 .. gamma_p)."""
        # Solve the Yule-Walker system for gamma given coefficients.
        a = np.asarray(theta[1:], dtype=float)
        s2 = theta[0]
        p = self.p
        # gamma_k - sum_j a_j gamma_{|k-j|} = s2 * 1{k=0}, k = 0..p
        M = np.zeros((p + 1, p + 1))
        for k in range(p + 1):
            M[k, k] += 1.0
            for j in range(1, p + 1):
                M[k, abs(k - j)] -= a[j - 1]
        rhs = np.zeros(p + 1)
        rhs[0] = s2
        return np.linalg.solve(M, rhs)

    def default_starts(self, spec, lam, n):
        """theta_init candidates: moment-implied fit and a conservative center."""
        spec = np.asarray(spec, dtype=float)
        lam = np.asarray(lam, dtype=float)
        # Autocovariances implied by the spectrum values (Riemann sum over G(n)).
        h = np.arange(self.p + 1)
        gam = (4.0 * np.pi / n) * (np.cos(np.outer(h, lam)) @ spec)
        starts = []
        if gam[0] > 0:
            try:
                phi, sig2 = _levinson(gam, self.p)
            except InvalidInputError:
                phi, sig2 = None, None
            if phi is not None:
                cand = np.concatenate(([max(sig2, 1e-10)], phi))
                # shrink toward white noise if the fit sits on/over the margin
                for _ in range(60):
                    if self.valid(cand):
                        starts.append(cand)
                        break
                    cand = np.concatenate(([cand[0]], 0.97 * cand[1:]))
        center = np.concatenate(([max(2.0 * np.pi * float(np.mean(spec)), 1e-10)],
                                 np.zeros(self.p)))
        starts.append(center)
        return starts


def _levinson(gamma: np.ndarray, p: int):
    """Levinson-Durbin recursion: AR(p) coefficients and innovation variance."""
    phi = np.zeros(p)
    if p == 0:
        return phi, float(gamma[0])
    sig2 = float(gamma[0])
    if sig2 <= 0:
        raise InvalidInputError("autocovariance at lag 0 must be positive")
    phi_prev = np.zeros(0)
    for k in range(1, p + 1):
        acc = gamma[k] - np.sum(phi_prev * gamma[1:k][::-1]) if k > 1 else gamma[1]
        kappa = acc / sig2
        phi_k = np.empty(k)
        phi_k[:-1] = phi_prev - kappa * phi_prev[::-1]
        phi_k[-1] = kappa
        sig2 *= 1.0 - kappa**2
        phi_prev = phi_k
    return phi_prev, float(sig2)
