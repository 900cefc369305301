"""Inverse branches of f(z) = lam*tan(z^2) onto the regions L_n.

The preimage of z in L_n is +-sqrt(A + j*pi) with
A = (1/2i) Log((lam + iz)/(lam - iz)) on the principal logarithm; the shift j
puts Re(A + j*pi) into the strip of L_n and the sign of the root picks the
half-plane.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .lattice import BOUNDARY_OFFSET, pole, region_index_array, strip_interval
from .mapcore import INF, as_lambda, evaluate_array, is_infinite

ASYMPTOTIC_TOL = 1e-12
ROUND_TRIP_TOL = 1e-8
SHIFT_WINDOW = 2


class InverseBranchError(ValueError):
    stage: int | None = None


class AsymptoticValueExcluded(InverseBranchError):
    """The target is (numerically) one of the omitted values +-lam*i."""


class BranchUnavailable(InverseBranchError):
    """No shift in the search window produced a verified preimage in L_n."""


def principal_arctangent(lam, z):
    """A = (1/2i) Log((lam + iz)/(lam - iz)), i.e. arctan(z/lam) on principal branches."""
    z = np.asarray(z, dtype=complex)
    q = (lam + 1j * z) / (lam - 1j * z)
    return -0.5j * np.log(q)


def arctangent_components(lam, z) -> tuple[float, float]:
    """Real-coordinate formulas for A, used to cross-check :func:`principal_arctangent`.

    Re A = 1/2 atan2(2ax + 2by, |lam|^2 - |z|^2)
    Im A = -1/4 log(((|lam|^2 - |z|^2)^2 + (2ax + 2by)^2) / ((a + y)^2 + (b - x)^2)^2)
    with lam = a + bi and z = x + iy.  The two-argument arctangent fixes the
    branch to match the principal logarithm.
    """
    lam, z = complex(lam), complex(z)
    a, b, x, y = lam.real, lam.imag, z.real, z.imag
    num_re = abs(lam) ** 2 - abs(z) ** 2
    num_im = 2 * a * x + 2 * b * y
    re = 0.5 * math.atan2(num_im, num_re)
    im = -0.25 * math.log((num_re**2 + num_im**2) / ((a + y) ** 2 + (b - x) ** 2) ** 2)
    return re, im


def _root_for_region(n: int, w):
    """Square root of w on the half-plane of L_n."""
    r = np.sqrt(w)
    m, odd = n >> 1, n & 1
    if not odd:
        # principal root has Re >= 0
        return r if m >= 0 else -r
    flip = (r.imag < 0) if m >= 0 else (r.imag >= 0)
    return np.where(flip, -r, r)


def _initial_shift(n: int, re_a, offset: float):
    lo, hi = strip_interval(n, offset)
    if n & 1:
        # Re w in (lo, hi]
        return np.floor((hi - re_a) / math.pi)
    return np.ceil((lo - re_a) / math.pi)


def inverse_branch_array(lam, n: int, z, check: bool = True, offset: float = BOUNDARY_OFFSET):
    """Vectorised :func:`inverse_branch` over finite targets.

    Entries that cannot be resolved are NaN (or raise when ``check`` is set).
    Infinite entries map to the pole s_n.  ``offset`` is the boundary offset
    of the regions the preimages must land in; with offset 0 the cut of the
    branch is exactly the tear ray {i lam s : |s| >= 1}.
    """
    lam = as_lambda(lam)
    z = np.asarray(z, dtype=complex)
    inf_mask = ~np.isfinite(z)
    zz = np.where(inf_mask, 0, z)
    av = lam * 1j
    excluded = ~inf_mask & ((np.abs(zz - av) < ASYMPTOTIC_TOL) | (np.abs(zz + av) < ASYMPTOTIC_TOL))
    if check and np.any(excluded):
        raise AsymptoticValueExcluded(f"target within {ASYMPTOTIC_TOL} of an asymptotic value +-{av}")
    with np.errstate(divide="ignore", invalid="ignore"):
        a0 = principal_arctangent(lam, np.where(excluded, 0, zz))
    j0 = _initial_shift(n, a0.real, offset)
    out = np.full(z.shape, complex(np.nan, np.nan))
    todo = ~inf_mask & ~excluded
    for dj in sorted(range(-SHIFT_WINDOW, SHIFT_WINDOW + 1), key=abs):
        if not np.any(todo):
            break
        w = _root_for_region(n, a0 + (j0 + dj) * math.pi)
        with np.errstate(invalid="ignore", over="ignore"):
            back = evaluate_array(lam, w)
            ok = (region_index_array(w, offset) == n) & (np.abs(back - zz) <= ROUND_TRIP_TOL * (np.abs(zz) + abs(lam)))
        hit = todo & ok
        out = np.where(hit, w, out)
        todo &= ~hit
    if check and np.any(todo):
        raise BranchUnavailable(f"no verified preimage in L_{n} for {np.count_nonzero(todo)} target(s)")
    return np.where(inf_mask, pole(n), out)


def inverse_branch(p, n: int, z) -> complex:
    """The preimage of ``z`` under f that lies in the region L_n.

    ``z`` may be :data:`INF`, whose preimage in L_n is the pole s_n.
    """
    lam = as_lambda(p)
    z = complex(z)
    if is_infinite(z):
        return pole(n)
    return complex(inverse_branch_array(lam, n, z))


def composed_inverse(p, key: Sequence[int], z):
    """Apply the branches ``key[0]``, ``key[1]``, ... in that order.

    The result lies in L_{key[-1]} and reaches ``z`` after len(key) forward
    steps; its forward itinerary reads the key backwards.  Works on scalars
    and on arrays of targets.
    """
    lam = as_lambda(p)
    if len(key) == 0:
        raise ValueError("itinerary key must be nonempty")
    scalar = np.ndim(z) == 0
    w = np.asarray(z, dtype=complex)
    for stage, n in enumerate(key):
        try:
            w = inverse_branch_array(lam, n, w)
        except InverseBranchError as exc:
            exc.stage = stage
            raise
    return complex(w) if scalar else w


def preimage_chain(p, key: Sequence[int], z) -> list[complex]:
    """All stages of :func:`composed_inverse`, starting with ``z`` itself."""
    lam = as_lambda(p)
    chain = [complex(z)]
    w = complex(z)
    for stage, n in enumerate(key):
        try:
            w = inverse_branch(lam, n, w)
        except InverseBranchError as exc:
            exc.stage = stage
            raise
        chain.append(w)
    return chain


def pre_pole(p, key: Sequence[int]) -> complex:
    """The pre-pole reached by applying ``key`` to infinity."""
    return composed_inverse(p, key, INF)
