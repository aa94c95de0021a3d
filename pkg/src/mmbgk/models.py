"""Quasi-linear moment systems: dt w + A(w) dx w = S(w)/eps.

Three models share this interface. The adaptive (HME) model carries
w = (rho, u, theta, f_3, ..., f_{M-1}) and a state-dependent flux matrix;
the fixed-basis (HSM) model carries raw Hermite coefficients and a constant
symmetric tridiagonal matrix; the Euler model carries (rho, u, theta) in
primitive form with no collision source.
"""

from functools import lru_cache
import math

import numpy as np
from numpy.polynomial import hermite_e

from .basis import hsm_primitives, maxwellian_coefficients
from .errors import ConfigError, DomainError, StateError

_SQRT2 = math.sqrt(2.0)
_SQRT6 = math.sqrt(6.0)


@lru_cache(maxsize=None)
def largest_hermite_root(n: int) -> float:
    """Largest root of the probabilists' Hermite polynomial He_n."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    return float(hermite_e.hermegauss(n)[0][-1])


def _as_batch(w, n_vars_min):
    w = np.asarray(w, dtype=float)
    squeeze = w.ndim == 1
    if squeeze:
        w = w[None, :]
    if w.shape[1] < n_vars_min:
        raise DomainError(f"state needs at least {n_vars_min} entries, got {w.shape[1]}")
    return w, squeeze


def hme_system_matrices(w) -> np.ndarray:
    """Flux matrices A(w) of the adaptive moment system, batched.

    Accepts shape (M,) or (n, M), returns (M, M) or (n, M, M). The last row
    carries the hyperbolicity regularization: the (M-1, 1) entry is dropped
    and the (M-1, 2) entry uses -f_{M-2} in place of (M-1) f_{M-2} / 2.
    Entries on the constrained columns accumulate, so the sub-diagonal theta
    only appears where the column index is an unconstrained slot (>= 3).
    """
    w, squeeze = _as_batch(w, 4)
    n, m = w.shape
    rho, u, theta = w[:, 0], w[:, 1], w[:, 2]
    if np.any(rho <= 0.0) or np.any(theta <= 0.0):
        raise StateError("hme state needs rho > 0 and theta > 0")
    # fbar folds the consistency constraints into the recurrence pattern
    fbar = np.zeros_like(w)
    fbar[:, 0] = rho
    fbar[:, 3:] = w[:, 3:]
    a = np.zeros((n, m, m))
    a[:, 0, 0] = u
    a[:, 0, 1] = rho
    a[:, 1, 0] = theta / rho
    a[:, 1, 1] = u
    a[:, 1, 2] = 1.0
    a[:, 2, 1] = 2.0 * theta
    a[:, 2, 2] = u
    a[:, 2, 3] = 6.0 / rho
    for b in range(3, m - 1):
        a[:, b, 0] += -theta * fbar[:, b - 1] / rho
        a[:, b, 1] += (b + 1) * fbar[:, b]
        a[:, b, 2] += ((b - 1) * fbar[:, b - 1] + theta * fbar[:, b - 3]) / 2.0
        a[:, b, 3] += -3.0 * fbar[:, b - 2] / rho
        if b - 1 >= 3:
            a[:, b, b - 1] += theta
        a[:, b, b] += u
        a[:, b, b + 1] += b + 1
    b = m - 1
    a[:, b, 0] += -theta * fbar[:, b - 1] / rho
    a[:, b, 2] += -fbar[:, b - 1] + theta * fbar[:, b - 3] / 2.0
    a[:, b, 3] += -3.0 * fbar[:, b - 2] / rho
    if b - 1 >= 3:
        a[:, b, b - 1] += theta
    a[:, b, b] += u
    return a[0] if squeeze else a


def hme_system_matrix(w) -> np.ndarray:
    """A(w) for a single adaptive-model state vector."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 1:
        raise DomainError("expected a single state vector")
    return hme_system_matrices(w)


def hme_source(w, eps) -> np.ndarray:
    """-(1/eps) diag(0,0,0,1,...,1) w, the BGK term in adaptive variables."""
    if not eps > 0.0:
        raise ConfigError(f"relaxation time must be positive, got {eps}")
    w = np.asarray(w, dtype=float)
    s = np.zeros_like(w)
    if not math.isinf(eps):
        s[..., 3:] = -w[..., 3:] / eps
    return s


def hsm_system_matrix(m: int) -> np.ndarray:
    """Constant symmetric tridiagonal flux matrix, off-diagonals sqrt(1..M-1)."""
    if m < 2:
        raise DomainError(f"need M >= 2, got {m}")
    off = np.sqrt(np.arange(1.0, m))
    return np.diag(off, 1) + np.diag(off, -1)


def hsm_source(f, eps) -> np.ndarray:
    """-(1/eps)(f - f_M) with f_M the coefficient vector of the local Maxwellian."""
    if not eps > 0.0:
        raise ConfigError(f"relaxation time must be positive, got {eps}")
    f = np.asarray(f, dtype=float)
    if math.isinf(eps):
        return np.zeros_like(f)
    rho, u, theta = hsm_primitives(f)
    if np.any(rho <= 0.0) or np.any(theta <= 0.0):
        raise StateError("hsm state fails realizability: recovered rho or theta <= 0")
    m = maxwellian_coefficients(rho, u, theta, f.shape[-1])
    return -(f - m) / eps


def euler_system_matrix(w) -> np.ndarray:
    """3x3 flux matrix of the Euler system in primitive variables."""
    w = np.asarray(w, dtype=float)
    rho, u, theta = w[0], w[1], w[2]
    if rho <= 0.0 or theta <= 0.0:
        raise StateError("euler state needs rho > 0 and theta > 0")
    return np.array([[u, rho, 0.0], [theta / rho, u, 1.0], [0.0, 2.0 * theta, u]])


class HMEModel:
    """Adaptive-basis moment model with M >= 4 variables."""

    kind = "hme"

    def __init__(self, n_moments: int):
        if n_moments < 4:
            raise ConfigError(f"hme needs M >= 4, got {n_moments}")
        self.n_moments = n_moments
        self.n_vars = n_moments

    def system_matrices(self, w):
        return hme_system_matrices(w)

    def wave_speeds(self, w):
        """Per-cell bound |u| + sqrt(theta) r_M with r_M the largest He_M root."""
        w = np.atleast_2d(np.asarray(w, dtype=float))
        r = largest_hermite_root(self.n_moments)
        return np.abs(w[:, 1]) + np.sqrt(w[:, 2]) * r

    def source(self, w, eps):
        return hme_source(w, eps)

    def relax(self, w, eps, dt):
        """Forward-Euler collision update; multiplicative on the free slots."""
        if math.isinf(eps):
            return w.copy()
        out = w.copy()
        out[..., 3:] *= 1.0 - dt / eps
        return out

    def relax_exact(self, w, eps, dt):
        """Exact integration of the relaxation over dt."""
        if math.isinf(eps):
            return w.copy()
        out = w.copy()
        out[..., 3:] *= math.exp(-dt / eps)
        return out

    def primitive_moments(self, w):
        """(rho, u, theta) per cell, shape (n, 3)."""
        w = np.atleast_2d(np.asarray(w, dtype=float))
        return w[:, :3].copy()

    def heat_flux(self, w):
        w = np.atleast_2d(np.asarray(w, dtype=float))
        return 6.0 * w[:, 3]

    def equilibrium(self, rho, u, theta):
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        u, theta = np.broadcast_to(u, rho.shape), np.broadcast_to(theta, rho.shape)
        w = np.zeros((len(rho), self.n_vars))
        w[:, 0], w[:, 1], w[:, 2] = rho, u, theta
        return w

    def validate(self, w):
        w = np.atleast_2d(w)
        if not np.all(np.isfinite(w)):
            bad = int(np.argwhere(~np.isfinite(w).all(axis=1))[0, 0])
            raise StateError(f"non-finite state in cell {bad}")
        if np.any(w[:, 0] <= 0.0) or np.any(w[:, 2] <= 0.0):
            bad = int(np.argwhere((w[:, 0] <= 0.0) | (w[:, 2] <= 0.0))[0, 0])
            raise StateError(f"rho or theta <= 0 in cell {bad}")


class HSMModel:
    """Fixed-basis spectral model; linear transport, nonlinear source."""

    kind = "hsm"

    def __init__(self, n_moments: int):
        if n_moments < 3:
            raise ConfigError(f"hsm needs M >= 3, got {n_moments}")
        self.n_moments = n_moments
        self.n_vars = n_moments
        self._matrix = hsm_system_matrix(n_moments)

    def system_matrices(self, w):
        w = np.asarray(w, dtype=float)
        if w.ndim == 1:
            return self._matrix.copy()
        return np.broadcast_to(self._matrix, (w.shape[0],) + self._matrix.shape)

    def wave_speeds(self, w):
        w = np.atleast_2d(np.asarray(w, dtype=float))
        return np.full(w.shape[0], largest_hermite_root(self.n_moments))

    def source(self, f, eps):
        return hsm_source(f, eps)

    def relax(self, f, eps, dt):
        if math.isinf(eps):
            return f.copy()
        rho, u, theta = hsm_primitives(f)
        m = maxwellian_coefficients(rho, u, theta, self.n_vars)
        return m + (f - m) * (1.0 - dt / eps)

    def relax_exact(self, f, eps, dt):
        if math.isinf(eps):
            return f.copy()
        rho, u, theta = hsm_primitives(f)
        m = maxwellian_coefficients(rho, u, theta, self.n_vars)
        return m + (f - m) * math.exp(-dt / eps)

    def primitive_moments(self, f):
        f = np.atleast_2d(np.asarray(f, dtype=float))
        rho, u, theta = hsm_primitives(f)
        return np.stack([rho, u, theta], axis=1)

    def heat_flux(self, f):
        """Third central moment from the raw coefficients."""
        f = np.atleast_2d(np.asarray(f, dtype=float))
        rho, u, theta = hsm_primitives(f)
        m1 = f[:, 1]
        m2 = _SQRT2 * f[:, 2] + f[:, 0]
        m3 = 3.0 * f[:, 1]
        if f.shape[1] > 3:
            m3 = m3 + _SQRT6 * f[:, 3]
        return m3 - 3.0 * u * m2 + 3.0 * u * u * m1 - u ** 3 * rho

    def equilibrium(self, rho, u, theta):
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        u, theta = np.broadcast_to(u, rho.shape), np.broadcast_to(theta, rho.shape)
        return maxwellian_coefficients(rho, u, theta, self.n_vars)

    def validate(self, f):
        f = np.atleast_2d(f)
        if not np.all(np.isfinite(f)):
            bad = int(np.argwhere(~np.isfinite(f).all(axis=1))[0, 0])
            raise StateError(f"non-finite state in cell {bad}")
        rho, _, theta = hsm_primitives(f)
        if np.any(rho <= 0.0) or np.any(theta <= 0.0):
            bad = int(np.argwhere((rho <= 0.0) | (theta <= 0.0))[0, 0])
            raise StateError(f"recovered rho or theta <= 0 in cell {bad}")


class EulerModel:
    """Macroscopic limit model on (rho, u, theta); no collision term."""

    kind = "euler"
    n_vars = 3
    n_moments = 3

    def system_matrices(self, w):
        w = np.asarray(w, dtype=float)
        squeeze = w.ndim == 1
        w = np.atleast_2d(w)
        rho, u, theta = w[:, 0], w[:, 1], w[:, 2]
        if np.any(rho <= 0.0) or np.any(theta <= 0.0):
            raise StateError("euler state needs rho > 0 and theta > 0")
        a = np.zeros((w.shape[0], 3, 3))
        a[:, 0, 0] = u
        a[:, 0, 1] = rho
        a[:, 1, 0] = theta / rho
        a[:, 1, 1] = u
        a[:, 1, 2] = 1.0
        a[:, 2, 1] = 2.0 * theta
        a[:, 2, 2] = u
        return a[0] if squeeze else a

    def wave_speeds(self, w):
        w = np.atleast_2d(np.asarray(w, dtype=float))
        return np.abs(w[:, 1]) + np.sqrt(3.0 * w[:, 2])

    def source(self, w, eps):
        return np.zeros_like(np.asarray(w, dtype=float))

    def relax(self, w, eps, dt):
        return w.copy()

    def relax_exact(self, w, eps, dt):
        return w.copy()

    def primitive_moments(self, w):
        return np.atleast_2d(np.asarray(w, dtype=float)).copy()

    def heat_flux(self, w):
        w = np.atleast_2d(np.asarray(w, dtype=float))
        return np.zeros(w.shape[0])

    def equilibrium(self, rho, u, theta):
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        u, theta = np.broadcast_to(u, rho.shape), np.broadcast_to(theta, rho.shape)
        return np.stack([rho, np.asarray(u, dtype=float), np.asarray(theta, dtype=float)], axis=1)

    def validate(self, w):
        w = np.atleast_2d(w)
        if not np.all(np.isfinite(w)):
            bad = int(np.argwhere(~np.isfinite(w).all(axis=1))[0, 0])
            raise StateError(f"non-finite state in cell {bad}")
        if np.any(w[:, 0] <= 0.0) or np.any(w[:, 2] <= 0.0):
            bad = int(np.argwhere((w[:, 0] <= 0.0) | (w[:, 2] <= 0.0))[0, 0])
            raise StateError(f"rho or theta <= 0 in cell {bad}")


def make_model(kind: str, n_moments: int = 0):
    """Factory keyed by 'hme' | 'hsm' | 'euler'."""
    if kind == "hme":
        return HMEModel(n_moments)
    if kind == "hsm":
        return HSMModel(n_moments)
    if kind == "euler":
        return EulerModel()
    raise ConfigError(f"unknown model kind {kind!r}")
