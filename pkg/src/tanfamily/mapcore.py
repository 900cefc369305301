"""Evaluation and forward iteration of f(z) = lam * tan(z**2).

Points of the extended plane are plain Python ``complex`` values; the point
at infinity is the constant :data:`INF` and is detected with
:func:`is_infinite`.  Array variants work on ``complex128`` arrays with the
same convention.

Scalar routines run on :mod:`math` and array routines on numpy; both evaluate
the same formulas in the same order, so a point gets the same orbit whether
it is iterated alone or inside a raster.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

POLE_EPSILON = 1e-12
OVERFLOW_THRESHOLD = 1e15
CONVERGENCE_TOL = 1e-10
CONVERGENCE_RUN = 3

# Safety factor applied to the running forward-error bound when deciding that
# an orbit point sits on a pole.
POLE_ERROR_FACTOR = 1e3
# ... but never wider than this, so chaotic orbits that have lost all
# precision are not reported as pole hits
POLE_TOL_CAP = 1e-6

EPS = float(np.finfo(float).eps)
INF = complex(math.inf, 0.0)

# beyond this |Im w| the hyperbolic functions are replaced by their limits
_LARGE_IMAG = 20.0


def modulus(z):
    """|z| as sqrt(x*x + y*y), elementwise.

    Used wherever a modulus feeds a decision: Python's abs, math.hypot and
    numpy's abs/hypot do not agree to the last bit, this formula does.
    """
    z = np.asarray(z, dtype=complex)
    return np.sqrt(z.real * z.real + z.imag * z.imag)


def is_infinite(z) -> bool:
    return cmath.isinf(complex(z))


class PoleError(ArithmeticError):
    """Raised when a quantity is requested at a pole of the map."""

    def __init__(self, z, message: str | None = None):
        self.z = complex(z)
        super().__init__(message or f"pole of lam*tan(z^2) at z={self.z!r}")


@dataclass(frozen=True)
class Parameter:
    """A member of the family, identified by the nonzero complex ``lam``."""

    lam: complex

    def __post_init__(self):
        lam = complex(self.lam)
        if lam == 0 or not cmath.isfinite(lam):
            raise ValueError(f"lam must be a finite nonzero complex number, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)

    @property
    def asymptotic_values(self) -> tuple[complex, complex]:
        lam = self.lam
        return complex(-lam.imag, lam.real), complex(lam.imag, -lam.real)

    @property
    def critical_value(self) -> complex:
        return 0j


def as_lambda(p) -> complex:
    """Accept a :class:`Parameter` or a bare number and return lam."""
    if isinstance(p, Parameter):
        return p.lam
    return Parameter(p).lam


# ---------------------------------------------------------------------------
# numerical kernel
# ---------------------------------------------------------------------------

def _square(x, y):
    # (x - y)(x + y) keeps full relative accuracy near the diagonals
    return (x - y) * (x + y), 2.0 * x * y


def _tan_of_square(x, y):
    """tan(w) and |cos w|^2 for w = (x + iy)^2, elementwise.

    Uses tan(u+iv) = (sin u cos u + i sinh v cosh v) / (cos^2 u + sinh^2 v),
    whose denominator stays accurate next to the poles.
    """
    u, v = _square(x, y)
    vv = np.clip(v, -_LARGE_IMAG, _LARGE_IMAG)
    su, cu = np.sin(u), np.cos(u)
    sh, ch = np.sinh(vv), np.cosh(vv)
    den = cu * cu + sh * sh
    large = np.abs(v) > _LARGE_IMAG
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        tr = np.where(large, 4.0 * su * cu * np.exp(-2.0 * np.abs(v)), su * cu / den)
        ti = np.where(large, np.copysign(1.0, v), sh * ch / den)
        den = np.where(large, np.inf, den)
    return tr, ti, den, u, v


def _mul(a, b, tr, ti):
    return a * tr - b * ti, a * ti + b * tr


def evaluate_array(lam, z):
    """Vectorised :func:`evaluate`; ``lam`` may be a scalar or an array."""
    z = np.asarray(z, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    tr, ti, den, _, _ = _tan_of_square(z.real, z.imag)
    re, im = _mul(lam.real, lam.imag, tr, ti)
    out = re + 1j * im
    with np.errstate(invalid="ignore", over="ignore"):
        bad = (den < POLE_EPSILON**2) | (np.sqrt(re * re + im * im) > OVERFLOW_THRESHOLD)
        bad |= ~np.isfinite(z)
    return np.where(bad, INF, out)


# numpy's sinh/cosh/exp are not bit-identical to libm; the scalar path borrows
# them so that scalar and array orbits agree exactly
_sinh, _cosh, _exp = np.sinh, np.cosh, np.exp


def _tan_of_square_scalar(x: float, y: float):
    """Scalar twin of :func:`_tan_of_square`."""
    u = (x - y) * (x + y)
    v = 2.0 * x * y
    su, cu = math.sin(u), math.cos(u)
    if abs(v) > _LARGE_IMAG:
        return 4.0 * su * cu * float(_exp(-2.0 * abs(v))), math.copysign(1.0, v), math.inf, u, v
    sh, ch = float(_sinh(v)), float(_cosh(v))
    den = cu * cu + sh * sh
    if den == 0.0:
        return math.nan, math.nan, den, u, v
    return su * cu / den, sh * ch / den, den, u, v


def evaluate(p, z) -> complex:
    """f(z) = lam * tan(z^2), or :data:`INF` at (numerical) poles and overflow."""
    lam = as_lambda(p)
    z = complex(z)
    if not cmath.isfinite(z):
        raise ValueError("evaluate expects a finite point")
    tr, ti, den, _, _ = _tan_of_square_scalar(z.real, z.imag)
    if den < POLE_EPSILON**2:
        return INF
    re, im = _mul(lam.real, lam.imag, tr, ti)
    if not math.sqrt(re * re + im * im) <= OVERFLOW_THRESHOLD:
        return INF
    return complex(re, im)


def _sec2_of_square(x, y):
    """sec^2(w) for w = (x+iy)^2 together with |cos w|^2."""
    u, v = _square(x, y)
    vv = np.clip(v, -_LARGE_IMAG, _LARGE_IMAG)
    su, cu = np.sin(u), np.cos(u)
    sh, ch = np.sinh(vv), np.cosh(vv)
    den = cu * cu + sh * sh
    cos_w = cu * ch - 1j * su * sh
    large = np.abs(v) > _LARGE_IMAG
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        # |v| large: cos w ~ exp(|v|)/2 * exp(-i u sign v)
        asym = 4.0 * np.exp(-2.0 * np.abs(v)) * np.exp(2j * u * np.copysign(1.0, v))
        sec2 = np.where(large, asym, 1.0 / (cos_w * cos_w))
    return sec2, den


def derivative_array(lam, z):
    """2 lam z sec^2(z^2) elementwise; NaN where |cos(z^2)| < POLE_EPSILON."""
    z = np.asarray(z, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    sec2, den = _sec2_of_square(z.real, z.imag)
    d = 2.0 * lam * z * sec2
    return np.where(den < POLE_EPSILON**2, complex(np.nan, np.nan), d)


def derivative(p, z) -> complex:
    """f'(z) = 2 lam z sec^2(z^2).  Raises :class:`PoleError` at poles."""
    lam = as_lambda(p)
    z = complex(z)
    u = (z.real - z.imag) * (z.real + z.imag)
    v = 2.0 * z.real * z.imag
    if abs(v) > _LARGE_IMAG:
        sec2 = 4.0 * float(_exp(-2.0 * abs(v))) * complex(_exp(2j * u * math.copysign(1.0, v)))
    else:
        su, cu = math.sin(u), math.cos(u)
        sh, ch = float(_sinh(v)), float(_cosh(v))
        if cu * cu + sh * sh < POLE_EPSILON**2:
            raise PoleError(z)
        cos_w = complex(cu * ch, -su * sh)
        sec2 = 1.0 / (cos_w * cos_w)
    return 2.0 * lam * z * sec2


def orbit_derivative(p, z, k: int) -> complex:
    """(f^k)'(z) as the chain-rule product along the first k orbit points."""
    lam = as_lambda(p)
    z = complex(z)
    prod = 1 + 0j
    for _ in range(k):
        prod *= derivative(lam, z)
        z = evaluate(lam, z)
        if is_infinite(z):
            raise PoleError(z, "orbit reaches a pole before the requested step")
    return prod


# ---------------------------------------------------------------------------
# forward orbits
# ---------------------------------------------------------------------------

class Fate(enum.Enum):
    CONVERGED = "converged_to_point"
    HIT_POLE = "hit_pole"
    OVERFLOWED = "overflowed"
    BUDGET_EXHAUSTED = "budget_exhausted"


def step_array(lam, z, err):
    """One forward step with a running absolute error bound.

    Returns ``(z_next, pole, overflow, err_next)``.  A point is declared to be
    on a pole when |cos(z^2)| is below POLE_EPSILON or below
    POLE_ERROR_FACTOR times the uncertainty of z^2 implied by ``err``; this
    lets pre-poles whose orbits expand rounding errors still register the
    pole at the right step.
    """
    lam = np.asarray(lam, dtype=complex)
    x, y = z.real, z.imag
    tr, ti, den, u, v = _tan_of_square(x, y)
    re, im = _mul(lam.real, lam.imag, tr, ti)
    absz = np.sqrt(x * x + y * y)
    absw = np.sqrt(u * u + v * v)
    dw = 2.0 * absz * err + EPS * absw
    tol = np.clip(POLE_ERROR_FACTOR * dw, POLE_EPSILON, POLE_TOL_CAP)
    with np.errstate(invalid="ignore", over="ignore"):
        pole = den < tol * tol
        mag = np.sqrt(re * re + im * im)
        overflow = ~pole & ~(mag <= OVERFLOW_THRESHOLD)
        err_next = modulus(lam) / den * dw + EPS * mag
    z_next = np.where(pole | overflow, INF, re + 1j * im)
    return z_next, pole, overflow, err_next


@dataclass(frozen=True)
class OrbitRecord:
    """Forward orbit ``points[0..steps_used]`` and how the iteration ended.

    ``stop_step`` is the index j of the infinite point for HIT_POLE and
    OVERFLOWED fates, otherwise None.
    """

    lam: complex
    points: np.ndarray
    fate: Fate
    steps_used: int
    stop_step: int | None = None

    @property
    def seed(self) -> complex:
        return complex(self.points[0])

    @property
    def last(self) -> complex:
        return complex(self.points[-1])


def iterate(p, z0, max_steps: int, convergence_tol: float = CONVERGENCE_TOL) -> OrbitRecord:
    """Iterate f from ``z0`` for at most ``max_steps`` steps.

    Stops early on a pole, on overflow, or once ``CONVERGENCE_RUN``
    consecutive steps move by less than ``convergence_tol``.
    """
    lam = as_lambda(p)
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    z = complex(z0)
    if not cmath.isfinite(z):
        raise ValueError("iterate expects a finite seed")
    a, b = lam.real, lam.imag
    alam = math.sqrt(a * a + b * b)
    err = EPS * math.sqrt(z.real * z.real + z.imag * z.imag)
    points = [z]
    run = 0
    for step in range(1, max_steps + 1):
        x, y = z.real, z.imag
        tr, ti, den, u, v = _tan_of_square_scalar(x, y)
        re, im = _mul(a, b, tr, ti)
        dw = 2.0 * math.sqrt(x * x + y * y) * err + EPS * math.sqrt(u * u + v * v)
        tol = min(max(POLE_EPSILON, POLE_ERROR_FACTOR * dw), POLE_TOL_CAP)
        mag = math.sqrt(re * re + im * im)
        if den < tol * tol or not mag <= OVERFLOW_THRESHOLD:
            points.append(INF)
            fate = Fate.HIT_POLE if den < tol * tol else Fate.OVERFLOWED
            return OrbitRecord(lam, np.array(points), fate, step, step)
        err = alam / den * dw + EPS * mag
        z_next = complex(re, im)
        points.append(z_next)
        dx, dy = re - x, im - y
        run = run + 1 if math.sqrt(dx * dx + dy * dy) < convergence_tol else 0
        z = z_next
        if run >= CONVERGENCE_RUN:
            return OrbitRecord(lam, np.array(points), Fate.CONVERGED, step)
    return OrbitRecord(lam, np.array(points), Fate.BUDGET_EXHAUSTED, max_steps)
