"""Zeros, poles and the fundamental regions L_n of lam*tan(z^2).

Indexing: even n = 2m lives on the real axis, odd n = 2m+1 on the imaginary
axis, negative m on the negative half-axis.

Regions are described in w = z^2.  With b_k = (k + 1/2)*pi - BOUNDARY_OFFSET
the band k covers b_k <= |Re w| < b_(k+1); positive Re w gives even indices,
negative Re w odd ones, and the sign of Re z (even) or Im z (odd) picks the
half-plane.  The offset moves every boundary curve about a hundred ulps
towards the origin so that rounded copies of the pole s_n and of the curve
c_n through it still land in L_n.  Every band still has width pi, so
z -> tan(z^2) stays a bijection from L_n onto the sphere minus the two
asymptotic values.
"""
from __future__ import annotations

import math

import numpy as np

BOUNDARY_OFFSET = 1e-13

NO_REGION = np.iinfo(np.int64).min


def _split(n: int) -> tuple[int, bool]:
    # n = 2m or 2m+1 with floor semantics for negative n
    return n >> 1, bool(n & 1)


def zero(n: int) -> complex:
    """The zero q_n."""
    m, odd = _split(n)
    if not odd:
        r = math.sqrt(m * math.pi) if m >= 0 else -math.sqrt(-m * math.pi)
        return complex(r, 0.0)
    r = math.sqrt((m + 1) * math.pi) if m >= 0 else -math.sqrt(-m * math.pi)
    return complex(0.0, r)


def pole(n: int) -> complex:
    """The pole s_n."""
    m, odd = _split(n)
    r = math.sqrt(abs(m + 0.5) * math.pi)
    if m < 0:
        r = -r
    return complex(0.0, r) if odd else complex(r, 0.0)


def band_floor(k: int, offset: float = BOUNDARY_OFFSET) -> float:
    return (k + 0.5) * math.pi - offset


def _band_index(a, offset: float = BOUNDARY_OFFSET):
    """k with band_floor(k) <= a < band_floor(k+1) for a >= band_floor(0)."""
    k = np.floor((a + offset) / math.pi - 0.5)
    k = np.maximum(k, 0.0)
    # one correction step each way absorbs the rounding of the division
    k = np.where(a < (k + 0.5) * math.pi - offset, k - 1, k)
    k = np.where(a >= (k + 1.5) * math.pi - offset, k + 1, k)
    return k.astype(np.int64)


def region_index_array(z, offset: float = BOUNDARY_OFFSET):
    """Vectorised :func:`region_of`; :data:`NO_REGION` marks the central set.

    ``offset`` moves the boundary curves towards the origin; a larger value
    than the default snaps points lying within it onto the closed side.
    """
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    u = (x - y) * (x + y)
    a = np.abs(u)
    k = _band_index(a, offset)
    even = np.where(x >= 0, 2 * k, -2 * (k + 1))
    odd = np.where(y >= 0, 2 * k + 1, -2 * k - 1)
    n = np.where(u > 0, even, odd)
    return np.where(a >= band_floor(0, offset), n, NO_REGION)


def region_of(z, offset: float = BOUNDARY_OFFSET) -> int | None:
    """Index n of the region L_n containing z, or None in the central set."""
    n = int(region_index_array(complex(z), offset))
    return None if n == NO_REGION else n


def region_contains(n: int, z) -> bool:
    """Membership test for L_n written directly from the interval description."""
    z = complex(z)
    x, y = z.real, z.imag
    u = (x - y) * (x + y)
    m, odd = _split(n)
    k = m if m >= 0 else -m - 1
    lo, hi = band_floor(k), band_floor(k + 1)
    if not odd:
        side = x >= 0 if m >= 0 else x < 0
        return side and lo <= u < hi
    side = y >= 0 if m >= 0 else y < 0
    return side and -hi < u <= -lo


def strip_interval(n: int, offset: float = BOUNDARY_OFFSET) -> tuple[float, float]:
    """Bounds (lo, hi) for Re(z^2) on L_n; closed at the end nearer the origin."""
    m, odd = _split(n)
    k = m if m >= 0 else -m - 1
    lo, hi = band_floor(k, offset), band_floor(k + 1, offset)
    return (-hi, -lo) if odd else (lo, hi)


def quadrant_array(z, axis_tol: float = 0.0):
    """Quadrant labels 1..4, counterclockwise from the positive quadrant.

    Points on an axis, or within ``axis_tol * |z|`` of it, go to the
    positive side.
    """
    z = np.asarray(z, dtype=complex)
    tol = axis_tol * np.abs(z)
    xpos = z.real >= -tol
    ypos = z.imag >= -tol
    return np.where(ypos, np.where(xpos, 1, 2), np.where(xpos, 4, 3)).astype(np.int64)


def quadrant(z, axis_tol: float = 0.0) -> int:
    return int(quadrant_array(complex(z), axis_tol))
