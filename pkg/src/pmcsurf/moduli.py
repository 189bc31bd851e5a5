"""Moduli of complete parallel mean curvature surfaces, and its limits.

The catalog is a small executable table: each stratum knows its p-range
and, when the surfaces are built in this package, its family constructor.
The limit and associated-family routines compare profiles numerically.

Profiles of different p live on different domains |u| < u_max(p), so they
are compared at fractional coordinates u = f * u_max with f in
{0, 0.1, ..., 0.9}.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .elliptic import DomainError
from .surfaces import (
    QUARTER,
    BoundaryMinus,
    BoundaryPlus,
    GeneralHigh,
    GeneralLow,
    Hirakawa,
    SurfaceParams,
    domain_halfwidth,
    frame_data,
    general,
)
from .verify import GridSpec

AMBIENTS = ("CP2", "CH2")
FRACTIONS = np.arange(10) / 10.0
MONOTONE_TOL = 1e-12
ASSOC_TOL = 1e-12
PHASE_TOL = 1e-10
NONISO_THRESHOLD = 1e-6
NONISO_MIN_SEPARATION = 1e-3


# --- catalog ---------------------------------------------------------------


@dataclass(frozen=True)
class PRange:
    """A set of p values: an open interval, a point, or a one-sided limit point.

    ``side`` is -1 / +1 for the limit points 1/4- and 1/4+, else 0.
    """

    lo: float
    hi: float
    side: int = 0

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, p: float, side: int = 0) -> bool:
        if self.is_point:
            return p == self.lo and side == self.side
        return self.lo < p < self.hi and side == 0

    def overlaps(self, other: "PRange") -> bool:
        if self.is_point and other.is_point:
            return self.lo == other.lo and self.side == other.side
        if self.is_point:
            return other.contains(self.lo, self.side)
        if other.is_point:
            return self.contains(other.lo, other.side)
        return max(self.lo, other.lo) < min(self.hi, other.hi)

    def __str__(self):
        if self.is_point:
            suffix = {-1: "-", 1: "+", 0: ""}[self.side]
            return f"{{{self.lo:g}{suffix}}}"
        return f"({self.lo:g}, {self.hi:g})"


@dataclass(frozen=True)
class Stratum:
    name: str
    ambient: str
    description: str
    p_range: PRange | None = None
    family_tag: str | None = None
    circle: bool = False  # carries the t coordinate on S^1 = [0, pi]/(0 ~ pi)
    constructor: Callable | None = field(default=None, compare=False, repr=False)

    @property
    def constructible(self) -> bool:
        return self.constructor is not None

    def build(self, b: float, t: float = 0.0, p: float | None = None) -> SurfaceParams:
        if self.constructor is None:
            raise DomainError(f"stratum {self.name} has no constructor in this package")
        if self.family_tag == "general":
            if p is None or not self.p_range.contains(p):
                raise DomainError(f"stratum {self.name} needs p in {self.p_range}")
            return SurfaceParams(b, t, self.constructor(p))
        return SurfaceParams(b, t, self.constructor())

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "ambient": self.ambient,
            "p_range": None if self.p_range is None else str(self.p_range),
            "family": self.family_tag,
            "circle": self.circle,
            "constructible": self.constructible,
            "description": self.description,
        }


_CP2 = (
    Stratum("FlatTorusPoint", "CP2",
            "the flat torus; the whole moduli space is one point (not constructed here)"),
)

_CH2 = (
    Stratum("Cone1Vertex", "CH2", "Hirakawa surface: K = -2b^2, c = 0",
            PRange(0.0, 0.0), "hirakawa", False, Hirakawa),
    Stratum("Cone1Interior", "CH2", "general type, 8 - 9 sin^2 alpha < 0",
            PRange(0.0, QUARTER), "general", True, GeneralLow),
    Stratum("Cone1Base", "CH2", "a real, modulus 1/3; numerical limit of p -> 1/4-",
            PRange(QUARTER, QUARTER, -1), "boundary-plus", True, BoundaryPlus),
    Stratum("Cone2Base", "CH2", "a real, modulus 2 sqrt(2)/3; numerical limit of p -> 1/4+",
            PRange(QUARTER, QUARTER, 1), "boundary-minus", True, BoundaryMinus),
    Stratum("Cone2Interior", "CH2", "general type, 8 - 9 sin^2 alpha > 0",
            PRange(QUARTER, math.inf), "general", True, GeneralHigh),
    Stratum("Cone2Apex", "CH2",
            "Chen surface: constant Kaehler angle, the point p = infinity (not constructed here)",
            PRange(math.inf, math.inf)),
    Stratum("FlatTotallyReal", "CH2",
            "flat totally real surfaces of constant Kaehler angle in CH^2[4 rho], "
            "-2b^2 <= rho < 0; outside the two cones of rho = -3b^2 (not constructed here)"),
)


def describe_moduli(ambient: str) -> tuple[Stratum, ...]:
    """Stratum catalog for ``CP2`` or ``CH2`` (case-insensitive)."""
    key = ambient.strip().upper()
    if key == "CP2":
        return _CP2
    if key == "CH2":
        return _CH2
    raise DomainError(f"ambient must be one of {AMBIENTS}, got {ambient!r}")


def ranges_disjoint(strata: Sequence[Stratum]) -> bool:
    ranged = [s.p_range for s in strata if s.p_range is not None]
    return all(not x.overlaps(y) for i, x in enumerate(ranged) for y in ranged[i + 1:])


def normalize_t(t: float) -> float:
    """t on the circle [0, pi) obtained by identifying t = 0 with t = pi."""
    r = math.fmod(float(t), math.pi)
    if r < 0:
        r += math.pi
    return 0.0 if math.isclose(r, math.pi, rel_tol=0.0, abs_tol=1e-15) else r


@dataclass(frozen=True)
class ModuliPoint:
    ambient: str
    stratum: str
    t: float | None
    p: float | None

    def __post_init__(self):
        names = {s.name: s for s in describe_moduli(self.ambient)}
        if self.stratum not in names:
            raise DomainError(f"no stratum {self.stratum!r} in {self.ambient}")
        st = names[self.stratum]
        t = None if not st.circle or self.t is None else normalize_t(self.t)
        object.__setattr__(self, "t", t)


def moduli_point(params: SurfaceParams) -> ModuliPoint:
    """The CH^2 moduli point of a constructed surface."""
    fam = params.family
    side = {BoundaryPlus: -1, BoundaryMinus: 1}.get(type(fam), 0)
    hits = [s for s in _CH2 if s.p_range is not None and s.constructible
            and s.p_range.contains(fam.p, side)]
    if len(hits) != 1:
        raise AssertionError(f"p = {fam.p} maps to {len(hits)} strata")
    return ModuliPoint("CH2", hits[0].name, params.t, fam.p)


# --- convergence tables -----------------------------------------------------


@dataclass
class ConvergenceTable:
    """Gap columns against a reference surface along a p sequence."""

    reference: str
    p: np.ndarray
    gap_alpha: np.ndarray  # max |sin^2 alpha_p - sin^2 alpha_ref|
    gap_c: np.ndarray
    gap_K: np.ndarray
    notes: dict = field(default_factory=dict)

    COLUMNS = ("p", "gap_alpha", "gap_c", "gap_K")

    def monotone(self, column: str) -> bool:
        return bool(np.all(np.diff(getattr(self, column)) <= MONOTONE_TOL))

    @property
    def all_monotone(self) -> bool:
        return all(self.monotone(c) for c in self.COLUMNS[1:])

    def rows(self):
        return list(zip(*(getattr(self, c).tolist() for c in self.COLUMNS)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for row in self.rows():
            w.writerow([f"{x:.17g}" for x in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "reference": self.reference,
            "columns": list(self.COLUMNS),
            "rows": self.rows(),
            "monotone": {c: self.monotone(c) for c in self.COLUMNS[1:]},
            "notes": self.notes,
        }


def _profile(params: SurfaceParams, fractions):
    return frame_data(params, np.asarray(fractions) * domain_halfwidth(params))


def _gaps(fp, fq, c_against_zero=False):
    ga = np.max(np.abs(fp.sin2_alpha - fq.sin2_alpha))
    gc = np.max(np.abs(fp.c)) if c_against_zero else np.max(np.abs(fp.c - fq.c))
    gk = np.max(np.abs(fp.gauss_K - fq.gauss_K))
    return ga, gc, gk


def limit_p_to_zero(b: float, t: float, p_sequence, grid=FRACTIONS) -> ConvergenceTable:
    """GeneralLow(p) against the Hirakawa surface as p -> 0.

    gap_c is max |c_p| itself (c vanishes on the Hirakawa surface).
    """
    ps = np.asarray(p_sequence, dtype=float)
    if np.any(ps <= 0) or np.any(ps >= QUARTER) or np.any(np.diff(ps) >= 0):
        raise DomainError("p_sequence must decrease inside (0, 1/4)")
    ref = _profile(SurfaceParams(b, t, Hirakawa()), grid)
    cols = np.array([_gaps(_profile(SurfaceParams(b, t, GeneralLow(p)), grid), ref, True)
                     for p in ps])
    return ConvergenceTable("hirakawa", ps, cols[:, 0], cols[:, 1], cols[:, 2],
                            {"K_reference": -2.0 * b * b})


# labels of the two boundary circles as the classification names them by
# elliptic modulus, and as the moduli description names the one-sided limits
_LABEL_BY_MODULUS = {"boundary-plus": "x_{t,1/4+}", "boundary-minus": "x_{t,1/4-}"}
_LABEL_BY_SIDE = {"low": "x_{t,1/4-}", "high": "x_{t,1/4+}"}


def limit_p_to_quarter(b: float, t: float, side: str, p_sequence,
                       grid=FRACTIONS) -> ConvergenceTable:
    """GeneralLow/High(p) as p -> 1/4 from ``side`` ('low' or 'high').

    Both boundary families are compared; the table's columns hold the gaps
    to the one with the smaller final sin^2 alpha gap, and ``notes`` records
    both candidates together with the modulus prediction and the two
    labelling conventions.
    """
    if side not in ("low", "high"):
        raise DomainError("side must be 'low' or 'high'")
    ps = np.asarray(p_sequence, dtype=float)
    dist = np.abs(ps - QUARTER)
    if (side == "low" and np.any(ps >= QUARTER)) or (side == "high" and np.any(ps <= QUARTER)):
        raise DomainError(f"p_sequence must approach 1/4 from the {side} side")
    if np.any(np.diff(dist) >= 0):
        raise DomainError("p_sequence must approach 1/4 monotonically")

    fr = np.asarray(grid, dtype=float)
    cands = {}
    for fam in (BoundaryPlus(), BoundaryMinus()):
        q = SurfaceParams(b, t, fam)
        # the modulus 2 sqrt(2)/3 surface has a complex point at u = 0
        usable = fr if fam.low else fr[fr > 0]
        ref = _profile(q, usable)
        cols = np.array([_gaps(_profile(SurfaceParams(b, t, general(p)), usable), ref)
                         for p in ps])
        cands[fam.tag] = cols

    matched = min(cands, key=lambda k: cands[k][-1, 0])
    k_end = general(ps[-1]).modulus
    expected = "boundary-plus" if abs(k_end - 1 / 3) < abs(k_end - 2 * math.sqrt(2) / 3) \
        else "boundary-minus"
    cols = cands[matched]
    notes = {
        "side": side,
        "matched": matched,
        "expected_by_modulus": expected,
        "modulus_at_last_p": float(k_end),
        "final_gap_alpha": {k: float(v[-1, 0]) for k, v in cands.items()},
        "label_by_modulus": _LABEL_BY_MODULUS[matched],
        "label_by_side": _LABEL_BY_SIDE[side],
        "labels_agree": _LABEL_BY_MODULUS[matched] == _LABEL_BY_SIDE[side],
    }
    return ConvergenceTable(matched, ps, cols[:, 0], cols[:, 1], cols[:, 2], notes)


# --- associated family and non-isometry -----------------------------------


@dataclass
class AssociatedFamilyReport:
    p: float
    t_list: list[float]
    deviations: dict  # quantity -> max deviation from t_list[0]
    phase_error: float  # max |c(t)/c(t0) - e^{i(t - t0)}|
    tolerance: float = ASSOC_TOL
    phase_tolerance: float = PHASE_TOL

    @property
    def passed(self) -> bool:
        return (all(v <= self.tolerance for v in self.deviations.values())
                and self.phase_error <= self.phase_tolerance)

    def to_dict(self) -> dict:
        return {"p": self.p, "t_list": self.t_list, "deviations": self.deviations,
                "phase_error": self.phase_error, "tolerance": self.tolerance,
                "phase_tolerance": self.phase_tolerance, "pass": self.passed}


def associated_family_check(b: float, p: float, t_list, grid: GridSpec | None = None
                            ) -> AssociatedFamilyReport:
    """The surfaces x_{t,p}, t in t_list, share alpha, metric, |a|, |c| and K;
    c rotates by e^{it}."""
    grid = GridSpec() if grid is None else grid
    fam = general(p)
    ts = [float(t) for t in t_list]
    base = SurfaceParams(b, ts[0], fam)
    u = grid.points(base)
    f0 = frame_data(base, u)
    quantities = {
        "alpha": lambda f: f.alpha,
        "metric": lambda f: f.metric,
        "abs_a": lambda f: np.abs(f.a),
        "abs_c": lambda f: np.abs(f.c),
        "gauss_K": lambda f: f.gauss_K,
    }
    dev = {k: 0.0 for k in quantities}
    phase_err = 0.0
    for t in ts[1:]:
        f = frame_data(base.with_t(t), u)
        for k, get in quantities.items():
            dev[k] = max(dev[k], float(np.max(np.abs(get(f) - get(f0)))))
        ratio = f.c / f0.c
        phase_err = max(phase_err, float(np.max(np.abs(ratio - np.exp(1j * (t - ts[0]))))))
    return AssociatedFamilyReport(float(p), ts, dev, phase_err)


@dataclass
class NonIsometryReport:
    p: float
    q: float
    gap: float  # max over fractional samples of |sin^2 alpha(p) - sin^2 alpha(q)|
    threshold: float = NONISO_THRESHOLD

    @property
    def asserted(self) -> bool:
        """Whether |p - q| is large enough for the threshold to apply."""
        return abs(self.q - self.p) >= NONISO_MIN_SEPARATION

    @property
    def passed(self) -> bool:
        return self.gap > self.threshold if self.asserted else True

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "gap": self.gap, "threshold": self.threshold,
                "asserted": self.asserted, "pass": self.passed}


def non_isometry_check(b: float, p: float, q: float, grid=FRACTIONS) -> NonIsometryReport:
    """Distinct p give distinct Kaehler angle profiles, hence non-isometric surfaces."""
    if not (0.0 < p <= q):
        raise DomainError("need 0 < p <= q")
    fp = _profile(SurfaceParams(b, 0.0, general(p)), grid)
    fq = _profile(SurfaceParams(b, 0.0, general(q)), grid)
    return NonIsometryReport(float(p), float(q), float(np.max(np.abs(fp.sin2_alpha - fq.sin2_alpha))))
