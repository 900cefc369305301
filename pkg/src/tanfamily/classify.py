"""Periodic cycles, multipliers and the parameter dichotomy.

The origin is always a super-attracting fixed point.  Any other attracting
cycle must capture the asymptotic values +-lam*i, whose orbits merge after
one step because f is even, so following the single orbit of lam*i decides
the parameter:

* it falls into the origin                     -> ORIGIN_ONLY
* it settles on an attracting cycle elsewhere  -> ATTRACTING_CYCLE
* it lands on a pole or overflows              -> SINGULAR_ESCAPE
* anything else (neutral, slow, long period)   -> UNDETERMINED
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .mapcore import (
    CONVERGENCE_TOL,
    Fate,
    OrbitRecord,
    PoleError,
    as_lambda,
    derivative,
    evaluate,
    is_infinite,
    iterate,
    modulus,
)

CYCLE_TOL = 1e-9
P_MAX = 64
KIND_TOL = 1e-6
SUPER_TOL = 1e-8
ORIGIN_TOL = 1e-6
ORIGIN_RUN = 3
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 40
DEFAULT_BUDGET = 2000


class PoleOnCycle(PoleError):
    pass


class CycleKind(enum.Enum):
    SUPER_ATTRACTING = "super_attracting"
    ATTRACTING = "attracting"
    NEUTRAL = "neutral"
    REPELLING = "repelling"


def cycle_kind(rho: complex) -> CycleKind:
    r = abs(rho)
    if r < SUPER_TOL:
        return CycleKind.SUPER_ATTRACTING
    if r < 1 - KIND_TOL:
        return CycleKind.ATTRACTING
    if r <= 1 + KIND_TOL:
        return CycleKind.NEUTRAL
    return CycleKind.REPELLING


@dataclass(frozen=True)
class CycleInfo:
    period: int
    representative: complex
    multiplier: complex
    kind: CycleKind
    points: tuple[complex, ...] = ()

    @property
    def is_attracting(self) -> bool:
        return self.kind in (CycleKind.ATTRACTING, CycleKind.SUPER_ATTRACTING)


def _orbit_and_derivative(lam, z, period):
    d = 1 + 0j
    for _ in range(period):
        try:
            d *= derivative(lam, z)
        except PoleError as exc:
            raise PoleOnCycle(exc.z) from None
        z = evaluate(lam, z)
        if is_infinite(z):
            raise PoleOnCycle(z, "cycle passes through a pole")
    return z, d


def multiplier(p, z0, period: int) -> complex:
    """rho = (f^period)'(z0) as a chain-rule product along the orbit."""
    lam = as_lambda(p)
    if period < 1:
        raise ValueError("period must be >= 1")
    return _orbit_and_derivative(lam, complex(z0), period)[1]


def _smallest_recurrence(tail: np.ndarray, cycle_tol: float, p_max: int) -> int | None:
    n = len(tail)
    for p in range(1, p_max + 1):
        if n < 2 * p:
            break
        if np.all(np.abs(tail[p:] - tail[:-p]) < cycle_tol):
            return p
    return None


def refine_cycle_point(lam, z, period: int) -> complex | None:
    """Newton's method on f^period(z) - z; None unless it reaches NEWTON_TOL."""
    z = complex(z)
    for _ in range(NEWTON_MAX_ITER):
        try:
            fz, d = _orbit_and_derivative(lam, z, period)
        except PoleOnCycle:
            return None
        g = fz - z
        if abs(g) < NEWTON_TOL:
            return z
        if d == 1:
            return None
        z = z - g / (d - 1)
    return None


def cycle_from_tail(lam, tail, cycle_tol: float = CYCLE_TOL, p_max: int = P_MAX) -> CycleInfo | None:
    """Cycle detection on the final stretch of an orbit."""
    tail = np.asarray(tail, dtype=complex)
    if len(tail) < 2 or not np.all(np.isfinite(tail)):
        return None
    p = _smallest_recurrence(tail, cycle_tol, p_max)
    if p is None:
        return None
    start = complex(tail[-1])
    rep = refine_cycle_point(lam, start, p)
    if rep is None or abs(rep - start) > 1e3 * cycle_tol + 1e-6:
        return None
    points = [rep]
    for _ in range(p - 1):
        points.append(evaluate(lam, points[-1]))
    rho = multiplier(lam, rep, p)
    return CycleInfo(p, rep, rho, cycle_kind(rho), tuple(points))


def tail_length(n_points: int) -> int:
    """Length of the orbit tail searched for recurrence: the last quarter."""
    return max(n_points // 4, 2)


def detect_cycle(orbit: OrbitRecord, cycle_tol: float = CYCLE_TOL, p_max: int = P_MAX) -> CycleInfo | None:
    """Smallest period p <= p_max recurring over the last quarter of ``orbit``.

    The candidate is polished by Newton's method on f^p(z) - z before its
    multiplier is computed.  Returns None when nothing recurs or the polish
    fails.
    """
    if orbit.fate in (Fate.HIT_POLE, Fate.OVERFLOWED):
        return None
    pts = orbit.points
    return cycle_from_tail(orbit.lam, pts[len(pts) - tail_length(len(pts)):], cycle_tol, p_max)


class Verdict(enum.Enum):
    ORIGIN_ONLY = "origin_only"
    ATTRACTING_CYCLE = "attracting_cycle"
    UNDETERMINED = "undetermined"
    SINGULAR_ESCAPE = "singular_escape"


@dataclass(frozen=True)
class ParameterClass:
    verdict: Verdict
    singular_orbit: OrbitRecord = field(repr=False)
    cycle: CycleInfo | None = None

    @property
    def period(self) -> int:
        if self.verdict is Verdict.ORIGIN_ONLY:
            return 1
        return self.cycle.period if self.verdict is Verdict.ATTRACTING_CYCLE else 0


def origin_capture_step(points) -> int | None:
    """First index at which ORIGIN_RUN consecutive points lie within ORIGIN_TOL of 0."""
    near = modulus(points) < ORIGIN_TOL
    run = 0
    for i, flag in enumerate(near):
        run = run + 1 if flag else 0
        if run >= ORIGIN_RUN:
            return i
    return None


def verdict_for_cycle(cycle: CycleInfo | None) -> Verdict:
    if cycle is None or not cycle.is_attracting:
        return Verdict.UNDETERMINED
    if min(abs(c) for c in cycle.points) < ORIGIN_TOL:
        return Verdict.ORIGIN_ONLY
    return Verdict.ATTRACTING_CYCLE


def classify_parameter(p, budget: int = DEFAULT_BUDGET) -> ParameterClass:
    """Follow the orbit of lam*i and sort the parameter into one of the verdicts.

    Only one orbit is ever followed, so at most one non-origin cycle can be
    reported.
    """
    lam = as_lambda(p)
    if budget < 100:
        raise ValueError("budget must be >= 100")
    orbit = iterate(lam, complex(-lam.imag, lam.real), budget, CONVERGENCE_TOL)
    if origin_capture_step(orbit.points) is not None:
        return ParameterClass(Verdict.ORIGIN_ONLY, orbit)
    if orbit.fate in (Fate.HIT_POLE, Fate.OVERFLOWED):
        return ParameterClass(Verdict.SINGULAR_ESCAPE, orbit)
    cycle = detect_cycle(orbit)
    return ParameterClass(verdict_for_cycle(cycle), orbit, cycle)
