"""Residual engine: do the constructed frame data satisfy the structure equations?

Data depend on u only and phi = mu (du + i dv).  In these coordinates the
structure equations reduce to the scalar relations

    alpha_u = 2 Re((a + b) mu),       Im((a + b) mu) = 0,
    mu_u    = -2 |mu|^2 (conj(a) - b) cot(alpha),
    K       = -e^{-2 sigma} sigma_uu,  e^{2 sigma} = |mu|^2,

and the Codazzi equations are tested through their first integrals
mu^2 (8a + 9b sin^2 alpha) and mu^2 conj(c) together with the ODE of a
along alpha.  Every derivative is a central difference in u.

Algebraic checks pass at an absolute tolerance of 1e-9 (relative for the
first integrals and the metric identity).  Finite-difference checks are
rerun at h/2 and pass when the empirical order log2(r_h / r_{h/2}) of the
max residual is at least 1.9.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from .surfaces import (
    BoundaryMinus,
    FrameData,
    Hirakawa,
    SurfaceParams,
    alpha_ode_rhs,
    domain_halfwidth,
    frame_data,
)

ALGEBRAIC_TOL = 1e-9
MIN_ORDER = 1.9

CHECK_NAMES = (
    "structure1_reality",
    "structure1_alpha",
    "structure2_mu",
    "gauss",
    "codazzi_first_integral_a",
    "codazzi_first_integral_c",
    "codazzi_da_dalpha",
    "ricci",
    "abs_a_plus_b",
    "im_a_closed_form",
    "im_a_nonnegative",
    "sign_condition",
    "rea_closed_form",
    "rea_ode",
    "a_plus_b_closed_form",
    "k_identity",
    "c_squared_identity",
    "alpha_ode",
    "alpha_increasing",
    "theta_unit_modulus",
    "metric_identity",
)


@dataclass(frozen=True)
class GridSpec:
    """N uniform points on [-(1-delta) u_max, (1-delta) u_max].

    ``h`` is the absolute finite-difference step (default u_max * 1e-4).
    ``exclude`` removes |u| < exclude; BoundaryMinus defaults to
    1e-2 u_max because sin(alpha) vanishes at u = 0 there.
    """

    n: int = 400
    delta: float = 1e-3
    h: float | None = None
    exclude: float | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("grid needs at least 2 points")
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")

    def step(self, params: SurfaceParams) -> float:
        umax = domain_halfwidth(params)
        h = umax * 1e-4 if self.h is None else float(self.h)
        if not (0.0 < h < self.delta * umax):
            raise ValueError("h must be positive and smaller than delta * u_max")
        return h

    def exclusion(self, params: SurfaceParams) -> float:
        if self.exclude is not None:
            return float(self.exclude)
        if isinstance(params.family, BoundaryMinus):
            return 1e-2 * domain_halfwidth(params)
        return 0.0

    def points(self, params: SurfaceParams) -> np.ndarray:
        umax = domain_halfwidth(params)
        u = np.linspace(-(1 - self.delta) * umax, (1 - self.delta) * umax, self.n)
        u = 0.5 * (u - u[::-1])  # exactly symmetric, with u = 0 on odd grids
        eps = self.exclusion(params)
        if eps > 0:
            u = u[np.abs(u) >= eps]
        return u

    def describe(self, params: SurfaceParams) -> dict:
        return {
            "n": self.n,
            "delta": self.delta,
            "h": self.step(params),
            "exclude": self.exclusion(params),
        }


@dataclass
class CheckResult:
    name: str
    kind: str  # "algebraic" or "fd"
    max_residual: float
    at_u: float
    tolerance: float
    passed: bool
    order: float | None = None
    max_residual_half: float | None = None
    skipped: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


@dataclass
class ResidualReport:
    family: str
    params: dict
    grid: dict
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "grid": self.grid,
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), default=_json_default, **kw)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(type(o))


class _Stencil:
    """Frame data on the grid and at u +- h, u +- h/2."""

    def __init__(self, params: SurfaceParams, u: np.ndarray, h: float):
        self.params, self.u, self.h = params, u, h
        self.f0 = frame_data(params, u)
        self._cache = {}

    def at(self, offset: float) -> FrameData:
        if offset not in self._cache:
            self._cache[offset] = frame_data(self.params, self.u + offset)
        return self._cache[offset]

    def d1(self, attr, h):
        """Central first difference of a FrameData attribute (or callable of it)."""
        fp, fm = self.at(h), self.at(-h)
        get = attr if callable(attr) else (lambda f: getattr(f, attr))
        return (get(fp) - get(fm)) / (2.0 * h)

    def d2(self, attr, h):
        get = attr if callable(attr) else (lambda f: getattr(f, attr))
        return (get(self.at(h)) - 2.0 * get(self.f0) + get(self.at(-h))) / (h * h)


def _algebraic(name, u, resid, tol=ALGEBRAIC_TOL, note="") -> CheckResult:
    resid = np.abs(np.asarray(resid, dtype=float))
    i = int(np.argmax(resid))
    m = float(resid[i])
    return CheckResult(name, "algebraic", m, float(u[i]), tol, bool(m <= tol), note=note)


def _fd(name, u, residual_at, h, mask=None, note="") -> CheckResult:
    r1 = np.abs(residual_at(h))
    r2 = np.abs(residual_at(0.5 * h))
    if mask is not None:
        r1, r2, u = r1[mask], r2[mask], u[mask]
    i = int(np.argmax(r1))
    m1, m2 = float(r1[i]), float(np.max(r2))
    order = float(np.log2(m1 / m2)) if m2 > 0 and m1 > 0 else float("nan")
    ok = bool(np.isfinite(order) and order >= MIN_ORDER)
    return CheckResult(name, "fd", m1, float(u[i]), MIN_ORDER, ok, order=order,
                       max_residual_half=m2, note=note)


def _skipped(name, kind, note) -> CheckResult:
    return CheckResult(name, kind, 0.0, float("nan"), 0.0, True, skipped=True, note=note)


def _relative_spread(x):
    mean = np.mean(x)
    return np.abs(x - mean) / np.abs(mean)


def _as_stencil(params, grid):
    if isinstance(grid, _Stencil):
        return grid
    grid = GridSpec() if grid is None else grid
    return _Stencil(params, grid.points(params), grid.step(params))


# --- individual checks -----------------------------------------------------
# Each takes (params, grid) and returns a list of CheckResult; verify_all
# passes a shared stencil instead of a GridSpec.


def check_structure_eq1(params, grid=None):
    st = _as_stencil(params, grid)
    f, u = st.f0, st.u
    prod = f.a_plus_b * f.mu
    r1 = _algebraic("structure1_reality", u, prod.imag)

    def resid(h):
        return st.d1("alpha", h) - 2.0 * prod.real

    return [r1, _fd("structure1_alpha", u, resid, st.h)]


def check_structure_eq2(params, grid=None):
    st = _as_stencil(params, grid)
    f, u, b = st.f0, st.u, params.b
    rhs = -2.0 * f.metric * (np.conj(f.a) - b) / np.tan(f.alpha)

    def resid(h):
        return np.abs(st.d1("mu", h) - rhs)

    return [_fd("structure2_mu", u, resid, st.h)]


def metric_curvature(params: SurfaceParams, u, h=None, stencil: int = 5):
    """Gaussian curvature -e^{-2 sigma} sigma_uu from the metric alone.

    ``h`` may be an array (one step per point).  The default step shrinks
    with the distance to the domain edge, h = 3e-3 (u_max - |u|), where
    log|mu| has its blow-up.  ``stencil`` is 3 (second order) or 5 (fourth
    order).
    """
    u = np.asarray(u, dtype=float)
    if h is None:
        h = 3e-3 * (domain_halfwidth(params) - np.abs(u))
    h = np.broadcast_to(np.asarray(h, dtype=float), u.shape)

    def sigma(x):
        return 0.5 * np.log(frame_data(params, x).metric)

    s0 = sigma(u)
    if stencil == 3:
        suu = (sigma(u + h) - 2.0 * s0 + sigma(u - h)) / h**2
    elif stencil == 5:
        suu = (-sigma(u + 2 * h) + 16.0 * sigma(u + h) - 30.0 * s0
               + 16.0 * sigma(u - h) - sigma(u - 2 * h)) / (12.0 * h**2)
    else:
        raise ValueError("stencil must be 3 or 5")
    return -np.exp(-2.0 * s0) * suu


def check_gauss(params, grid=None):
    st = _as_stencil(params, grid)
    f, u = st.f0, st.u

    def resid(h):
        sig = lambda fd: 0.5 * np.log(fd.metric)  # noqa: E731
        return -st.d2(sig, h) / f.metric - f.gauss_K

    return [_fd("gauss", u, resid, st.h)]


def check_codazzi(params, grid=None):
    st = _as_stencil(params, grid)
    f, u, b, rho = st.f0, st.u, params.b, params.rho
    s = f.sin2_alpha
    # 8a + 9b s = 8(a + b) - b (8 - 9 s), which avoids cancellation near the edge
    fi_a = f.mu**2 * (8.0 * f.a_plus_b - b * f.eta)
    out = [_algebraic("codazzi_first_integral_a", u, _relative_spread(fi_a),
                      note="relative deviation from the grid mean")]
    if isinstance(params.family, Hirakawa):
        out.append(_skipped("codazzi_first_integral_c", "algebraic", "c vanishes identically"))
    else:
        fi_c = f.mu**2 * np.conj(f.c)
        out.append(_algebraic("codazzi_first_integral_c", u, _relative_spread(fi_c),
                              note="relative deviation from the grid mean"))

    num = (-2.0 * b * f.a + 2.0 * np.abs(f.a) ** 2 + 1.5 * rho * s) / np.tan(f.alpha)

    def resid(h):
        # da/dalpha = num / (conj(a) + b), multiplied through by (conj(a) + b) alpha_u
        return np.abs((np.conj(f.a) + b) * st.d1("a", h) - num * st.d1("alpha", h))

    out.append(_fd("codazzi_da_dalpha", u, resid, st.h,
                   note="(conj a + b) a_u - cot(alpha)(...) alpha_u"))
    return out


def check_ricci(params, grid=None):
    st = _as_stencil(params, grid)
    f, u = st.f0, st.u
    resid = np.abs(f.c) ** 2 - np.abs(f.a) ** 2 - 0.5 * params.rho * (-2.0 + 3.0 * f.sin2_alpha)
    return [_algebraic("ricci", u, resid)]


def check_a_coefficients(params, grid=None):
    st = _as_stencil(params, grid)
    f, u, b, rho, p = st.f0, st.u, params.b, params.rho, params.p
    s = f.sin2_alpha
    w = (8.0 * b * b + 3.0 * rho * s) / (4.0 * b)
    x = f.a.real + b
    r1 = np.abs(f.a + b) ** 2 - w * x
    r2 = f.a.imag**2 - x * (w - x)
    out = [_algebraic("abs_a_plus_b", u, r1), _algebraic("im_a_closed_form", u, r2)]

    # Im a >= 0 on the increasing branch (u > 0 for the high families)
    mask = np.ones_like(u, dtype=bool) if params.family.low else u > 0
    viol = np.where(mask, np.maximum(-f.a.imag, 0.0), 0.0)
    out.append(_algebraic("im_a_nonnegative", u, viol,
                          note="evaluated where alpha increases"))

    eta = f.eta
    cond = (1.0 - 4.0 * p) * (b * b * eta) * (-2.0 * b * b + p * b * b * eta)
    out.append(_algebraic("sign_condition", u, np.maximum(-cond, 0.0),
                          note="violation of (1-4p)(8b^2+3 rho s)(-2b^2+p(8b^2+3 rho s)) >= 0"))
    return out


def check_rea_ode(params, grid=None):
    st = _as_stencil(params, grid)
    f, u, b, rho, p = st.f0, st.u, params.b, params.rho, params.p
    s = f.sin2_alpha
    L = 8.0 * b * b + 3.0 * rho * s
    closed = -b + L * (-2.0 * b * b + p * L) / (3.0 * b * rho * s)
    out = [_algebraic("rea_closed_form", u, f.a.real - closed)]
    cot = 1.0 / np.tan(f.alpha)

    def resid(h):
        # linear ODE in alpha multiplied by L alpha_u
        ra_u = st.d1(lambda fd: fd.a.real, h)
        al_u = st.d1("alpha", h)
        return (L * ra_u + 2.0 * cot * al_u * ((8.0 * b * b - 3.0 * rho * s) * f.a.real
                                                - b * (8.0 * b * b + 9.0 * rho * s)))

    out.append(_fd("rea_ode", u, resid, st.h))
    apb = L**2 * (-2.0 * b * b + p * L) / (12.0 * b * b * rho * s)
    out.append(_algebraic("a_plus_b_closed_form", u, np.abs(f.a + b) ** 2 - apb))
    return out


def check_k_identity(params, grid=None):
    st = _as_stencil(params, grid)
    f, u, b, rho, p = st.f0, st.u, params.b, params.rho, params.p
    s = f.sin2_alpha
    lhs = 8.0 * np.abs(f.a) ** 2 + 18.0 * b * f.a.real * s - 8.0 * b * b + 18.0 * b * b * s
    rhs = 6.0 * (rho + 3.0 * b * b) / b * (f.a.real + b) * s
    L = 8.0 * b * b + 3.0 * rho * s
    c2 = -(rho + 3.0 * b * b) + p / (4.0 * b * b) * L**2
    return [_algebraic("k_identity", u, lhs - rhs),
            _algebraic("c_squared_identity", u, np.abs(f.c) ** 2 - c2)]


def check_alpha_ode(params, grid=None):
    st = _as_stencil(params, grid)
    f, u = st.f0, st.u
    rhs = alpha_ode_rhs(params, f.sin2_alpha, f.eta)
    mask = u > 0

    def resid(h):
        return st.d1("alpha", h) - rhs

    out = [_fd("alpha_ode", u, resid, st.h, mask=mask, note="u > 0")]
    slope = st.d1("alpha", st.h)
    out.append(_algebraic("alpha_increasing", u, np.where(mask, np.maximum(-slope, 0.0), 0.0),
                          tol=0.0, note="d alpha/du >= 0 for u > 0"))
    return out


def check_theta(params, grid=None):
    st = _as_stencil(params, grid)
    # recomputed from alpha alone, not from the stored phase
    f, u, b, p = st.f0, st.u, params.b, params.p
    sin_a = np.sin(f.alpha)
    eta = 8.0 - 9.0 * sin_a**2
    mod = np.sqrt(4.0 * (2.0 - p * eta) + np.abs((1.0 - 4.0 * p) * eta)) / (3.0 * sin_a)
    out = [_algebraic("theta_unit_modulus", u, mod - 1.0)]
    out.append(_algebraic("metric_identity", u, f.metric * np.abs(f.eta) / (36.0 * b * b) - 1.0,
                          note="relative"))
    return out


_ALL = (
    check_structure_eq1,
    check_structure_eq2,
    check_gauss,
    check_codazzi,
    check_ricci,
    check_a_coefficients,
    check_rea_ode,
    check_k_identity,
    check_alpha_ode,
    check_theta,
)


def verify_all(params: SurfaceParams, grid: GridSpec | None = None) -> ResidualReport:
    """Run every check on the grid and collect a ResidualReport."""
    grid = GridSpec() if grid is None else grid
    u = grid.points(params)
    h = grid.step(params)
    st = _Stencil(params, u, h)
    results = {}
    for check in _ALL:
        try:
            for r in check(params, st):
                results[r.name] = r
        except Exception as exc:  # report is always produced
            results[check.__name__] = CheckResult(check.__name__, "error", float("nan"),
                                                  float("nan"), 0.0, False, note=repr(exc))
    ordered = [results.pop(n) for n in CHECK_NAMES if n in results]
    ordered += [results[k] for k in results]  # errors, if any
    return ResidualReport(
        family=params.family.label,
        params={"b": params.b, "t": params.t, "p": params.p},
        grid=grid.describe(params),
        checks=ordered,
    )


# --- completeness ----------------------------------------------------------


@dataclass
class CompletenessResult:
    eps: np.ndarray
    lengths: np.ndarray
    intercept: float
    slope: float
    r_squared: float
    problems: list[str]

    @property
    def increasing(self) -> bool:
        return bool(np.all(np.diff(self.lengths) > 0))

    def rows(self):
        return list(zip(self.eps.tolist(), self.lengths.tolist()))


def completeness_probe(params: SurfaceParams, eps_list=None) -> CompletenessResult:
    """L(eps) = integral of |mu| over [0, u_max - eps], with a fit A + B log(1/eps).

    A divergent L as eps -> 0 certifies that u -> u_max is at infinite
    distance.  Quadrature warnings are collected, not raised.
    """
    umax = domain_halfwidth(params)
    if eps_list is None:
        eps_list = umax * 10.0 ** -np.arange(2, 8)
    eps = np.asarray(eps_list, dtype=float)
    if np.any(eps <= 0) or np.any(eps >= 0.5 * umax) or np.any(np.diff(eps) >= 0):
        raise ValueError("eps values must be decreasing and lie in (0, u_max/2)")

    def speed(x):
        return float(np.sqrt(frame_data(params, x).metric))

    problems = []
    edges = np.concatenate([[0.0], umax - eps])
    pieces = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", integrate.IntegrationWarning)
            val, err = integrate.quad(speed, lo, hi, epsabs=0.0, epsrel=1e-10, limit=200)
        for w in caught:
            problems.append(f"[{lo:.6g}, {hi:.6g}]: {w.message}")
        pieces.append(val)
    lengths = np.cumsum(pieces)
    x = np.log(1.0 / eps)
    B, A = np.polyfit(x, lengths, 1)
    fit = A + B * x
    ss_res = float(np.sum((lengths - fit) ** 2))
    ss_tot = float(np.sum((lengths - lengths.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else float("nan")
    return CompletenessResult(eps, lengths, float(A), float(B), r2, problems)
