"""Closed-form frame data of the parallel mean curvature surfaces in CH^2[-12 b^2].

Every family is written in the isothermal coordinates w = u + i v in which
all data depend on u only.  The metric one-form is phi = mu (du + i dv),
so ds^2 = |mu|^2 (du^2 + dv^2), and the ambient constant is rho = -3 b^2.

Branch conventions (see README for the derivation):

* ``eta`` denotes 8 - 9 sin^2(alpha).  It is negative on the "low" families
  (BoundaryPlus, GeneralLow, Hirakawa) and positive on the "high" ones
  (BoundaryMinus, GeneralHigh).  It is evaluated from cn directly so that
  it keeps full relative precision near the edge of the domain.
* On the low families the Kaehler angle increases with u, which fixes the
  overall sign of mu to be negative relative to the bare closed form.
* On the high families alpha is even in u and u = 0 is a turning point of
  the alpha-ODE.  The root sqrt(2 - p*eta) is continued through it as the
  signed quantity sqrt(2) sn, so the frame data stay smooth across u = 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

from .elliptic import DomainError, amplitude, complete_K

__all__ = [
    "DomainError",
    "SingularPoint",
    "SurfaceFamily",
    "BoundaryPlus",
    "BoundaryMinus",
    "GeneralLow",
    "GeneralHigh",
    "Hirakawa",
    "general",
    "family_from_tag",
    "SurfaceParams",
    "FrameData",
    "domain_halfwidth",
    "kaehler_angle",
    "theta_phase",
    "frame_data",
    "gauss_curvature",
    "alpha_ode_rhs",
    "hirakawa_alpha_ode",
]

QUARTER = 0.25


class SingularPoint(ArithmeticError):
    """The frame data are not defined at this point (8 - 9 sin^2 alpha = 0 or sin alpha = 0)."""


class SurfaceFamily:
    """Base of the tagged union of surface families.

    ``p`` is the constant of the classification; the boundary families sit
    at p = 1/4 and the Hirakawa surface at p = 0.  ``low`` is True where
    8 - 9 sin^2(alpha) < 0.
    """

    tag: ClassVar[str]
    low: ClassVar[bool]
    p: float

    @property
    def scale(self) -> float:
        """Coefficient of b^2 u in the elliptic argument."""
        return 6.0 * np.sqrt(2.0 + self.p)

    @property
    def modulus(self) -> float:
        if self.low:
            return np.sqrt(self.p / (2.0 + self.p))
        return np.sqrt(2.0 / (2.0 + self.p))

    @property
    def label(self) -> str:
        return self.tag if self.tag != "general" else f"general(p={self.p:g})"


@dataclass(frozen=True)
class BoundaryPlus(SurfaceFamily):
    """a real, 8 - 9 sin^2 alpha < 0; elliptic modulus 1/3."""

    tag: ClassVar[str] = "boundary-plus"
    low: ClassVar[bool] = True
    p: float = QUARTER

    def __post_init__(self):
        if self.p != QUARTER:
            raise DomainError("boundary families sit at p = 1/4")

    @property
    def scale(self):
        return 9.0

    @property
    def modulus(self):
        return 1.0 / 3.0


@dataclass(frozen=True)
class BoundaryMinus(SurfaceFamily):
    """a real, 8 - 9 sin^2 alpha > 0; elliptic modulus 2 sqrt(2)/3."""

    tag: ClassVar[str] = "boundary-minus"
    low: ClassVar[bool] = False
    p: float = QUARTER

    def __post_init__(self):
        if self.p != QUARTER:
            raise DomainError("boundary families sit at p = 1/4")

    @property
    def scale(self):
        return 9.0

    @property
    def modulus(self):
        return 2.0 * np.sqrt(2.0) / 3.0


@dataclass(frozen=True)
class GeneralLow(SurfaceFamily):
    tag: ClassVar[str] = "general"
    low: ClassVar[bool] = True
    p: float = 0.1

    def __post_init__(self):
        p = float(self.p)
        if not (0.0 < p < QUARTER):
            raise DomainError(f"GeneralLow needs 0 < p < 1/4, got p={self.p!r}")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class GeneralHigh(SurfaceFamily):
    tag: ClassVar[str] = "general"
    low: ClassVar[bool] = False
    p: float = 1.0

    def __post_init__(self):
        p = float(self.p)
        if not (p > QUARTER and np.isfinite(p)):
            raise DomainError(f"GeneralHigh needs 1/4 < p < inf, got p={self.p!r}")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class Hirakawa(SurfaceFamily):
    """The p -> 0 limit: c = 0 and K = -2 b^2."""

    tag: ClassVar[str] = "hirakawa"
    low: ClassVar[bool] = True
    p: float = 0.0

    def __post_init__(self):
        if self.p != 0.0:
            raise DomainError("the Hirakawa surface sits at p = 0")

    @property
    def modulus(self):
        return 0.0


Family = Union[BoundaryPlus, BoundaryMinus, GeneralLow, GeneralHigh, Hirakawa]


def general(p: float) -> Family:
    """GeneralLow or GeneralHigh depending on which side of 1/4 p lies."""
    p = float(p)
    if p == QUARTER:
        raise DomainError("p = 1/4 is represented only by the boundary families")
    if p <= 0.0:
        raise DomainError(f"general families need p > 0, got {p!r}")
    return GeneralLow(p) if p < QUARTER else GeneralHigh(p)


def family_from_tag(tag: str, p: float | None = None) -> Family:
    tag = tag.strip().lower()
    if tag == "general":
        if p is None:
            raise DomainError("family 'general' needs p")
        return general(p)
    simple = {"boundary-plus": BoundaryPlus, "boundary-minus": BoundaryMinus, "hirakawa": Hirakawa}
    if tag not in simple:
        raise DomainError(f"unknown family tag {tag!r}")
    if p is not None:
        raise DomainError(f"family {tag!r} takes no p")
    return simple[tag]()


@dataclass(frozen=True)
class SurfaceParams:
    """One surface: |H| = 2b, associated-family phase t, and its family."""

    b: float
    t: float
    family: Family

    def __post_init__(self):
        b, t = float(self.b), float(self.t)
        if not (b > 0.0 and np.isfinite(b)):
            raise DomainError(f"b must be positive, got {self.b!r}")
        if not (0.0 <= t <= np.pi):
            raise DomainError(f"t must lie in [0, pi], got {self.t!r}")
        if not isinstance(self.family, SurfaceFamily):
            raise DomainError(f"not a surface family: {self.family!r}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "t", t)

    @property
    def rho(self) -> float:
        return -3.0 * self.b**2

    @property
    def p(self) -> float:
        return self.family.p

    def with_t(self, t: float) -> "SurfaceParams":
        return SurfaceParams(self.b, t, self.family)


@dataclass(frozen=True)
class FrameData:
    """Pointwise surface data; every field is an array over ``u`` (or a scalar)."""

    u: np.ndarray
    alpha: np.ndarray
    mu: np.ndarray
    a: np.ndarray
    c: np.ndarray
    metric: np.ndarray
    gauss_K: np.ndarray
    sin2_alpha: np.ndarray
    eta: np.ndarray
    a_plus_b: np.ndarray

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            v = getattr(self, name)
            if isinstance(v, np.ndarray):
                v.setflags(write=False)


def domain_halfwidth(params: SurfaceParams) -> float:
    """u_max with the surface defined on -u_max < u < u_max."""
    fam = params.family
    return complete_K(fam.modulus) / (fam.scale * params.b**2)


def _check_domain(params, u):
    u = np.asarray(u, dtype=float)
    umax = domain_halfwidth(params)
    if np.any(~np.isfinite(u)) or np.any(np.abs(u) >= umax):
        raise DomainError(f"u outside the domain |u| < {umax!r}")
    return u


def _elliptic(params, u):
    fam = params.family
    x = fam.scale * params.b**2 * u
    phi = amplitude(x, fam.modulus)
    return np.sin(phi), np.cos(phi)


def _angle_data(params, u):
    """alpha, sin^2 alpha, sin alpha, eta and the signed root sqrt(2 - p eta)."""
    fam = params.family
    p = fam.p
    sn, cn = _elliptic(params, u)
    if fam.low:
        # sin(gamma) = -3 cos(alpha)
        alpha = np.arccos(-sn / 3.0)
        s = 1.0 - sn * sn / 9.0
        sin_a = np.sqrt(s)
        eta = -cn * cn
        root = np.sqrt(2.0 + p * cn * cn)
    else:
        if isinstance(fam, BoundaryMinus):
            sin_a = (2.0 * np.sqrt(2.0) / 3.0) * np.abs(sn)
            s = sin_a * sin_a
            eta = 8.0 * cn * cn
        else:
            eta = (2.0 / p) * cn * cn
            # 9 s = 8 sn^2 + (8 - 2/p) cn^2: both terms >= 0, no cancellation near u = 0
            s = (8.0 * sn * sn + 2.0 * (4.0 * p - 1.0) / p * cn * cn) / 9.0
            sin_a = np.sqrt(s)
        alpha = np.arcsin(np.minimum(sin_a, 1.0))
        # 2 - p eta = 2 sn^2 on this branch; carry the sign of sn
        root = np.sqrt(2.0) * sn
    return alpha, s, sin_a, eta, root


def kaehler_angle(params: SurfaceParams, u):
    """Kaehler angle alpha(u) on the open domain |u| < u_max."""
    u = _check_domain(params, u)
    alpha = _angle_data(params, u)[0]
    return float(alpha) if alpha.ndim == 0 else alpha


def _phase(p, sin_a, eta, root):
    sign = 1.0 if p <= QUARTER else -1.0
    im = np.sqrt(np.abs((1.0 - 4.0 * p) * eta))
    return (2.0 * root + 1j * sign * im) / (3.0 * sin_a)


def theta_phase(params: SurfaceParams, alpha, branch: float = 1.0):
    """theta(alpha) with e^{i theta} = (2 r +- i sqrt|(1-4p)(8-9 sin^2)|) / (3 sin alpha).

    r = branch * sqrt(2 - p (8 - 9 sin^2 alpha)); the high families use
    branch = sign(u) (see module docstring).  Result lies in (-pi, pi].
    """
    p = params.p
    sin_a = np.sin(np.asarray(alpha, dtype=float))
    eta = 8.0 - 9.0 * sin_a**2
    if np.any(eta == 0.0) or np.any(sin_a == 0.0):
        raise SingularPoint("theta is undefined where 8 - 9 sin^2 alpha = 0")
    rad = 2.0 - p * eta
    if np.any(rad < -1e-14):
        raise DomainError("2 - p (8 - 9 sin^2 alpha) < 0: alpha outside the family's range")
    root = np.sign(branch) * np.sqrt(np.maximum(rad, 0.0))
    theta = np.angle(_phase(p, sin_a, eta, root))
    return float(theta) if theta.ndim == 0 else theta


def frame_data(params: SurfaceParams, u) -> FrameData:
    """Kaehler angle, mu, a, c, metric and Gaussian curvature at u."""
    u = _check_domain(params, u)
    fam, b = params.family, params.b
    alpha, s, sin_a, eta, root = _angle_data(params, u)
    if np.any(eta == 0.0):
        raise SingularPoint("8 - 9 sin^2 alpha vanishes")
    if np.any(sin_a == 0.0):
        raise SingularPoint("sin alpha vanishes (complex point)")

    if isinstance(fam, (BoundaryPlus, BoundaryMinus)):
        lam = 6.0 * b / np.sqrt(np.abs(eta))
        orient = -1.0 if fam.low else np.sign(u)
        mu = (orient * lam).astype(complex)
        apb = (0.25 * b * eta).astype(complex)
        c = 0.25 * b * np.abs(eta) * np.exp(1j * params.t)
    else:
        e = _phase(fam.p, sin_a, eta, root)
        orient = -1.0 if fam.low else 1.0
        mu = orient * 6.0 * b * e / np.sqrt(np.abs(eta))
        apb = b * eta * root * np.conj(e) / (6.0 * sin_a)
        if isinstance(fam, Hirakawa):
            c = np.zeros_like(mu)
        else:
            c = 0.5 * b * np.sqrt(fam.p) * np.abs(eta) * e * e * np.exp(1j * params.t)

    a = apb - b
    metric = mu.real**2 + mu.imag**2
    K = -4.0 * (np.abs(a) ** 2 - b * b) + 6.0 * params.rho * (1.0 - s)
    return FrameData(
        u=u, alpha=alpha, mu=mu, a=a, c=np.asarray(c), metric=metric,
        gauss_K=K, sin2_alpha=s, eta=eta, a_plus_b=apb,
    )


def gauss_curvature(params: SurfaceParams, u):
    """K = -4(|a|^2 - b^2) + 6 rho cos^2 alpha at rho = -3 b^2."""
    K = frame_data(params, u).gauss_K
    return float(K) if np.ndim(K) == 0 else K


def alpha_ode_rhs(params: SurfaceParams, sin2_alpha, eta=None):
    """Right side of the first-order ODE for alpha on its increasing branch."""
    b, p, fam = params.b, params.p, params.family
    s = np.asarray(sin2_alpha, dtype=float)
    if eta is None:
        eta = 8.0 - 9.0 * s
    if isinstance(fam, (BoundaryPlus, BoundaryMinus)):
        return 3.0 * b * b * np.sqrt(np.abs(eta))
    return 2.0 * b * b * np.sqrt(np.abs(eta) * np.maximum(2.0 - p * eta, 0.0)) / np.sqrt(s)


def hirakawa_alpha_ode(b: float, u, step: float | None = None):
    """Kaehler angle of the Hirakawa surface by RK4 on its ODE, alpha(0) = pi/2.

    Cross-check for the closed form cos(alpha) = -sin(6 sqrt(2) b^2 u)/3.
    The default step is u_max / 10^4.
    """
    params = SurfaceParams(b, 0.0, Hirakawa())
    u = _check_domain(params, u)
    if step is None:
        step = domain_halfwidth(params) / 1e4
    uu = np.atleast_1d(u)
    n = max(1, int(np.ceil(np.max(np.abs(uu)) / step)))
    h = uu / n
    bb = 2.0 * np.sqrt(2.0) * b * b

    def f(al):
        sa = np.sin(al)
        return bb * np.sqrt(np.maximum(9.0 * sa * sa - 8.0, 0.0)) / sa

    al = np.full_like(uu, 0.5 * np.pi)
    for _ in range(n):
        k1 = f(al)
        k2 = f(al + 0.5 * h * k1)
        k3 = f(al + 0.5 * h * k2)
        k4 = f(al + h * k3)
        al = al + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return float(al[0]) if np.ndim(u) == 0 else al
