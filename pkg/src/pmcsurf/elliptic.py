"""Jacobi amplitude, sn/cn/dn and the complete integral K.

All routines take the *modulus* k (not the parameter m = k**2).  Users of
libraries that follow the parameter convention (scipy.special.ellipk,
ellipj) must pass m = k**2 there.

Everything is vectorised over the first argument and dependency free
apart from numpy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "EllipticModulus",
    "agm",
    "complete_K",
    "incomplete_F",
    "amplitude",
    "sn_cn_dn",
    "amplitude_by_ode",
    "gudermannian",
]

_EPS = np.finfo(float).eps


class DomainError(ValueError):
    """Argument outside the domain where a function is defined."""


@dataclass(frozen=True)
class EllipticModulus:
    """Modulus k of a Jacobi elliptic function, 0 <= k <= 1."""

    k: float

    def __post_init__(self):
        k = float(self.k)
        if not np.isfinite(k) or k < 0.0 or k > 1.0:
            raise DomainError(f"elliptic modulus must lie in [0, 1], got {self.k!r}")
        object.__setattr__(self, "k", k)

    @property
    def m(self) -> float:
        """Parameter m = k**2."""
        return self.k * self.k

    @property
    def complementary(self) -> float:
        return np.sqrt((1.0 - self.k) * (1.0 + self.k))

    def __float__(self):
        return self.k


def _modulus(k) -> float:
    if isinstance(k, EllipticModulus):
        return k.k
    return EllipticModulus(k).k


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


def agm(a: float, g: float, tol: float = 4 * _EPS) -> float:
    """Arithmetic-geometric mean of two non-negative numbers."""
    a, g = float(a), float(g)
    if a < 0 or g < 0:
        raise DomainError("agm needs non-negative arguments")
    for _ in range(64):
        if abs(a - g) <= tol * a:
            break
        a, g = 0.5 * (a + g), np.sqrt(a * g)
    return 0.5 * (a + g)


def _agm_sequence(k: float):
    # a_n, g_n of the AGM started at (1, k'); used by the descending Landen scheme
    kp = np.sqrt((1.0 - k) * (1.0 + k))
    a, g = [1.0], [kp]
    while abs(a[-1] - g[-1]) > 4 * _EPS * a[-1] and len(a) < 64:
        a.append(0.5 * (a[-1] + g[-1]))
        g.append(np.sqrt(a[-2] * g[-1]))
    return a, g


def complete_K(k) -> float:
    """Complete elliptic integral of the first kind K(k) via the AGM.

    Raises DomainError for k >= 1 (the integral diverges) and k < 0.
    """
    k = _modulus(k)
    if k >= 1.0:
        raise DomainError("K(k) diverges at k = 1")
    return np.pi / (2.0 * agm(1.0, np.sqrt((1.0 - k) * (1.0 + k))))


def incomplete_F(phi, k):
    """Incomplete integral F(phi, k) by the descending Landen transformation.

    Valid for every real phi (F(phi + pi) = F(phi) + 2K).  At k = 1 the
    closed form artanh-type expression is used and |phi| must be < pi/2.
    """
    k = _modulus(k)
    phi_arr = np.asarray(phi, dtype=float)
    if k == 1.0:
        if np.any(np.abs(phi_arr) >= np.pi / 2):
            raise DomainError("F(phi, 1) diverges for |phi| >= pi/2")
        return _out(np.arctanh(np.sin(phi_arr)), phi)
    a, g = _agm_sequence(k)
    ph = phi_arr.copy()
    for an, gn in zip(a[:-1], g[:-1]):
        r = gn / an
        s, c = np.sin(ph), np.cos(ph)
        # tan(phi_{n+1} - phi_n) = r tan(phi_n), written without a branch cut
        ph = 2.0 * ph - np.arctan((1.0 - r) * s * c / (c * c + r * s * s))
    n = len(a) - 1
    return _out(ph / (2.0**n * a[-1]), phi)


def gudermannian(x):
    """gd(x) = 2 atan(tanh(x/2)), the amplitude at k = 1."""
    x_arr = np.asarray(x, dtype=float)
    return _out(2.0 * np.arctan(np.tanh(0.5 * x_arr)), x)


def amplitude(x, k):
    """Jacobi amplitude am(x, k), the inverse of F(., k).

    Arguments are reduced to [-K, K] with am(x + 2K) = am(x) + pi, then F is
    inverted on [-pi/2, pi/2] by a bracketed Newton iteration.
    """
    k = _modulus(k)
    x_arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x_arr)):
        raise DomainError("amplitude needs a finite argument")
    if k == 0.0:
        return _out(x_arr.copy(), x)
    if k == 1.0:
        return gudermannian(x)

    K = complete_K(k)
    n = np.round(x_arr / (2.0 * K))
    xr = x_arr - 2.0 * K * n
    k2 = k * k

    lo = np.full_like(xr, -0.5 * np.pi)
    hi = np.full_like(xr, 0.5 * np.pi)
    phi = 0.5 * np.pi * xr / K
    for _ in range(100):
        f = incomplete_F(phi, k) - xr
        lo = np.where(f < 0, phi, lo)
        hi = np.where(f > 0, phi, hi)
        step = f * np.sqrt(1.0 - k2 * np.sin(phi) ** 2)
        new = phi - step
        outside = (new <= lo) | (new >= hi)
        new = np.where(outside, 0.5 * (lo + hi), new)
        done = np.abs(new - phi) <= 2 * _EPS * np.maximum(1.0, np.abs(phi))
        phi = new
        if np.all(done):
            break
    return _out(phi + np.pi * n, x)


def sn_cn_dn(x, k):
    """Return (sn, cn, dn) at (x, k), built from the amplitude."""
    k = _modulus(k)
    phi = np.asarray(amplitude(x, k))
    sn, cn = np.sin(phi), np.cos(phi)
    dn = np.sqrt(1.0 - (k * sn) ** 2)
    if np.ndim(x) == 0:
        return float(sn), float(cn), float(dn)
    return sn, cn, dn


def amplitude_by_ode(x, k, steps: int = 2000):
    """am(x, k) by classical RK4 integration of dphi/dx = sqrt(1 - k^2 sin^2 phi).

    Independent of the Landen/Newton path; intended as a cross-check.
    """
    k = _modulus(k)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    k2 = k * k

    def f(ph):
        return np.sqrt(1.0 - k2 * np.sin(ph) ** 2)

    h = x_arr / steps
    ph = np.zeros_like(x_arr)
    for _ in range(steps):
        k1 = f(ph)
        k2_ = f(ph + 0.5 * h * k1)
        k3 = f(ph + 0.5 * h * k2_)
        k4 = f(ph + h * k3)
        ph = ph + h / 6.0 * (k1 + 2 * k2_ + 2 * k3 + k4)
    return float(ph[0]) if np.ndim(x) == 0 else ph
