"""Symbol space, shift, the metric d_kappa and itineraries of the Julia set.

A symbol is a pair (x, l): x is the index of the region L_x holding an orbit
point and l in 1..4 its quadrant.  A finite word records an orbit that reaches
a pole; it ends with (x, 0), (INFINITY, 0).

Regions come from :mod:`tanfamily.lattice` and quadrants are numbered
counterclockwise from the positive quadrant.  Nested cylinders are images of
probe sets under composed inverse branches.

Forward coding snaps points lying within CODING_OFFSET of a region boundary
curve, or within CODING_AXIS_TOL (relative) of an axis, onto the closed
side: pre-pole orbits sit exactly on those curves and axes, and forward
rounding would otherwise scatter their symbols.  Cylinders are traced
backwards instead, with branches cut exactly along the tear line and the
side of each axis carried along as a first-order displacement (see
:func:`_trace`).
"""
from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .classify import Verdict, classify_parameter
from .inverse import InverseBranchError, composed_inverse, inverse_branch_array, preimage_chain
from .lattice import quadrant, region_of
from .mapcore import EPS, INF, as_lambda, derivative_array, evaluate, is_infinite, iterate

INFINITY = math.inf
DEFAULT_KAPPA = 2.0

CODING_OFFSET = 1e-6
CODING_AXIS_TOL = 1e-8

PROBE_COUNT = 64
RAY_SAMPLES = 32
RAY_EXTENT = 1e3
RAY_ANGLE = 1e-9
TRACK_TOL = 1e-6
RESOLUTION_ULPS = 64
CUT_PUSH = 1e-10


class EmptyWord(ValueError):
    pass


class BadKappa(ValueError):
    pass


class LeftSymbolDomain(ValueError):
    """An orbit point fell into the central set, which carries no symbol."""

    def __init__(self, step: int, z: complex):
        self.step = step
        self.z = z
        super().__init__(f"iterate {step} at {z!r} lies in the uncoded central set")


class NotCantorRegime(ValueError):
    pass


class ProbeUnavailable(ValueError):
    """The probe circle needs |lam| < sqrt(pi/2)."""


class InadmissibleWord(ValueError):
    pass


class SymbolPair(NamedTuple):
    x: float | int
    l: int

    def __repr__(self):
        x = "inf" if self.x == INFINITY else self.x
        return f"({x},{self.l})"


TERMINAL = SymbolPair(INFINITY, 0)


def _pair(s) -> SymbolPair:
    x, l = s
    if x != INFINITY:
        x = int(x)
    return SymbolPair(x, int(l))


@dataclass(frozen=True)
class Itinerary:
    """A word of symbol pairs; ``terminated`` is derived from the symbols."""

    symbols: tuple[SymbolPair, ...]
    terminated: bool = field(init=False)

    def __init__(self, symbols: Iterable):
        syms = tuple(_pair(s) for s in symbols)
        object.__setattr__(self, "symbols", syms)
        object.__setattr__(self, "terminated", _check_word(syms))

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def __iter__(self):
        return iter(self.symbols)

    @property
    def regions(self) -> tuple[int, ...]:
        """Region indices of the finite orbit points."""
        return tuple(s.x for s in self.symbols if s.x != INFINITY)

    def to_list(self) -> list:
        return [["inf" if s.x == INFINITY else s.x, s.l] for s in self.symbols]

    def __repr__(self):
        return "Itinerary(" + ",".join(map(repr, self.symbols)) + ")"


def _check_word(syms: tuple[SymbolPair, ...]) -> bool:
    for i, (x, l) in enumerate(syms):
        if not 0 <= l <= 4:
            raise ValueError(f"label {l} out of range at index {i}")
        if x == INFINITY:
            if l != 0 or i != len(syms) - 1:
                raise ValueError("the infinity symbol may only close a word, as (inf, 0)")
        elif l == 0 and not (i == len(syms) - 2 and syms[-1] == TERMINAL):
            raise ValueError("label 0 is reserved for the terminal pair")
        elif not isinstance(x, int):
            raise ValueError(f"region index must be an integer, got {x!r}")
    if len(syms) >= 2 and syms[-1] == TERMINAL and syms[-2].l != 0:
        raise ValueError("a terminated word must end with (x, 0), (inf, 0)")
    return bool(syms) and syms[-1] == TERMINAL


def shift(t: Itinerary) -> Itinerary:
    """Drop the first symbol."""
    if len(t) < 2:
        raise EmptyWord("cannot shift a word with fewer than two symbols")
    return Itinerary(t.symbols[1:])


def first_difference(s: Sequence, t: Sequence) -> int | None:
    """Index of the first disagreement; a missing symbol counts as one."""
    for i, (a, b) in enumerate(zip(s, t)):
        if a != b:
            return i
    if len(s) != len(t):
        return min(len(s), len(t))
    return None


def distance_kappa(s: Itinerary, t: Itinerary, kappa: float = DEFAULT_KAPPA) -> float:
    """max_n e(s_n, t_n) / kappa**n with e the discrete metric on symbols."""
    if not kappa > 1:
        raise BadKappa(f"kappa must exceed 1, got {kappa!r}")
    i = first_difference(s, t)
    return 0.0 if i is None else float(kappa) ** -i


@functools.lru_cache(maxsize=256)
def _verdict(lam: complex) -> Verdict:
    return classify_parameter(lam).verdict


def require_cantor_regime(p) -> complex:
    lam = as_lambda(p)
    if _verdict(lam) is not Verdict.ORIGIN_ONLY:
        raise NotCantorRegime(f"lam={lam!r} is not in the Cantor regime ({_verdict(lam).value})")
    return lam


def itinerary_of(p, z, depth: int) -> Itinerary:
    """Symbols of the first ``depth`` orbit points of ``z``.

    An orbit reaching infinity yields a terminated word.
    """
    lam = require_cantor_regime(p)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    z = complex(z)
    if is_infinite(z):
        return Itinerary((TERMINAL,))
    pts = iterate(lam, z, depth, convergence_tol=0.0).points
    out = []
    for j in range(depth):
        zj = complex(pts[j])
        n = region_of(zj, CODING_OFFSET)
        if n is None:
            raise LeftSymbolDomain(j, zj)
        if is_infinite(pts[j + 1]):
            out += [SymbolPair(n, 0), TERMINAL]
            break
        out.append(SymbolPair(n, quadrant(zj, CODING_AXIS_TOL)))
    return Itinerary(out)


def probe_radius(lam: complex) -> float:
    """Radius r of the probe circle, halfway between |lam| and the regions.

    V = {|z| > r} contains every L_n, so each inverse branch maps V into
    itself and cylinders built from V are nested.
    """
    inner = math.sqrt(math.pi / 2)
    if abs(lam) >= inner:
        raise ProbeUnavailable(f"|lam| = {abs(lam):.4g} leaves no circle between the asymptotic values and the regions")
    return 0.5 * (abs(lam) + inner)


def _probe_set(lam: complex):
    """Probes with the exact offsets of the ray samples from the lines lam*R and i*lam*R."""
    rho = probe_radius(lam) / abs(lam)
    circle = rho * np.exp(2j * np.pi * (np.arange(PROBE_COUNT) + 0.5) / PROBE_COUNT)
    t = rho * np.geomspace(1.0, RAY_EXTENT, RAY_SAMPLES)
    untracked = complex(np.nan, np.nan)
    pts = [lam * circle]
    o_lam = [np.full(PROBE_COUNT, untracked)]
    o_cut = [np.full(PROBE_COUNT, untracked)]
    for d in (1, 1j, -1, -1j):
        for sgn in (1, -1):
            off = lam * d * 1j * sgn * RAY_ANGLE * t
            pts.append(lam * d * t + off)
            on_lam = d in (1, -1)
            o_lam.append(off if on_lam else np.full(t.shape, untracked))
            o_cut.append(np.full(t.shape, untracked) if on_lam else off)
    return np.concatenate(pts), np.concatenate(o_lam), np.concatenate(o_cut)


def cylinder_probes(p) -> np.ndarray:
    """Boundary samples of V cut along the lines that separate cylinders.

    Written in the frame w / lam: PROBE_COUNT points on the circle |w| = r,
    kept off the axes, plus RAY_SAMPLES points on each side of the four
    half-axes beyond it.  Preimages of lam*R lie on the coordinate axes and
    i*lam*R carries the cut of every inverse branch.
    """
    return _probe_set(as_lambda(p))[0]


def _probe_candidates(lam: complex) -> np.ndarray:
    # circle probes on the diagonals of the lam-frame, one per quadrant
    rho = probe_radius(lam) / abs(lam)
    return lam * rho * np.exp(1j * (np.pi / 4 + np.pi / 2 * np.arange(4)))


def _labels_match(chain: list[complex], labels: Sequence[int]) -> bool:
    # chain[0] is the probe and chain[-1] the first orbit point
    orbit = chain[::-1]
    return all(l == 0 or quadrant(orbit[j], CODING_AXIS_TOL) == l for j, l in enumerate(labels))


def _cut_side(lam: complex) -> float:
    # sign sigma such that sigma*lam points to the side of the cut line that
    # quadrant ties favour when the line is an axis
    return 1.0 if lam.real > 0 or (lam.real == 0 and lam.imag > 0) else -1.0


def _same_line(u: complex, v: complex) -> bool:
    return abs((u * v.conjugate()).imag) < 1e-15


def _offset_from(w, u: complex):
    # displacement of w from the line through 0 spanned by the unit vector u
    return u * 1j * (w / u).imag


def _trace(lam: complex, regions: Sequence[int], probes, o_lam=None, o_cut=None):
    """Stage points z_0 .. z_{d-1} of the probes under the branches, and their labels.

    Near the coordinate axes the coordinates of a stage point are swamped by
    rounding long before its side of the axis stops mattering, so each
    sample carries its displacement from the line it is close to.  A target
    near lam*R has its preimage near an axis, displaced by o / f'(z); a
    target near the cut line i*lam*R is pushed to its side by at least
    CUT_PUSH before the branch is taken.  Displacements are first-order and
    tracked while below TRACK_TOL (relative).  Labels take the side of an
    axis from the tracked displacement when there is one.  Samples that do
    not resolve are NaN with label 0.
    """
    lam = complex(lam)
    u_lam = lam / abs(lam)
    u_cut = 1j * u_lam
    w = np.asarray(probes, dtype=complex)
    nan = complex(np.nan, np.nan)
    o_lam = np.full(w.shape, nan) if o_lam is None else np.asarray(o_lam, dtype=complex)
    o_cut = np.full(w.shape, nan) if o_cut is None else np.asarray(o_cut, dtype=complex)
    stages, labels = [], []
    with np.errstate(invalid="ignore", divide="ignore"):
        for n in reversed(regions):
            dead = ~np.isfinite(w)
            w = np.where(dead, 0, w)
            aw = np.abs(w)
            o_lam = np.where(np.isnan(o_lam), _offset_from(w, u_lam), o_lam)
            o_cut = np.where(np.isnan(o_cut), _offset_from(w, u_cut), o_cut)
            near_lam = np.abs(o_lam) < TRACK_TOL * aw
            oc = np.where(o_cut == 0, u_lam * _cut_side(lam), o_cut)
            push = np.abs(oc) < CUT_PUSH * aw
            w_eff = np.where(push, w - o_cut + oc / np.abs(oc) * CUT_PUSH * aw, w)
            z = inverse_branch_array(lam, n, w_eff, check=False, offset=0.0)
            z = np.where(dead, nan, z)
            oz = np.where(near_lam, o_lam / derivative_array(lam, z), nan)
            on_real = np.abs(z.imag) <= np.abs(z.real)
            o_re = np.where(on_real, 1j * oz.imag, nan)
            o_im = np.where(on_real, nan, oz.real + 0j)
            sx = np.where(np.isnan(o_im), z.real, o_im.real)
            sy = np.where(np.isnan(o_re), z.imag, o_re.imag)
            q = np.where(sy >= 0, np.where(sx >= 0, 1, 2), np.where(sx >= 0, 4, 3))
            stages.append(z)
            labels.append(np.where(np.isfinite(z), q, 0).astype(np.int64))
            o_lam = o_re if _same_line(u_lam, 1) else o_im if _same_line(u_lam, 1j) else np.full(z.shape, nan)
            o_cut = o_re if _same_line(u_cut, 1) else o_im if _same_line(u_cut, 1j) else np.full(z.shape, nan)
            w = z
    return stages[::-1], labels[::-1]


def point_from_itinerary(p, t: Itinerary, depth: int | None = None) -> complex:
    """A point whose itinerary starts with ``t``.

    Terminated words give their pre-pole exactly.  Other words, cut to
    ``depth`` symbols, give the image of a probe point under the nested
    inverse branches; :func:`cylinder_estimate` adds a size bound.
    """
    lam = require_cantor_regime(p)
    if not isinstance(t, Itinerary):
        t = Itinerary(t)
    if len(t) == 0:
        raise EmptyWord("empty word")
    if t.terminated and (depth is None or depth >= len(t) - 1):
        if len(t) == 1:
            return INF
        chain = preimage_chain(lam, t.regions[::-1], INF)
        if not _labels_match(chain, [s.l for s in t.symbols[:-1]]):
            raise InadmissibleWord(f"no pre-pole carries the labels of {t!r}")
        return chain[-1]
    syms = t.symbols[: len(t) if depth is None else depth]
    if any(s.l == 0 for s in syms):
        raise InadmissibleWord("labels must be 1..4 in an unterminated word")
    stages, labels = _trace(lam, [s.x for s in syms], _probe_candidates(lam))
    ok = np.all([lab == s.l for lab, s in zip(labels, syms)], axis=0)
    if not ok.any():
        raise InadmissibleWord(f"labels of {t!r} are not realised by any cylinder point")
    return complex(stages[0][np.argmax(ok)])


def cylinder_points(p, word) -> np.ndarray:
    """Samples of the cylinder of ``word`` on its boundary.

    ``word`` is an :class:`Itinerary` or a sequence of pairs; samples whose
    labels differ from the word's are dropped.
    """
    lam = as_lambda(p)
    syms = [_pair(s) for s in word]
    stages, labels = _trace(lam, [s.x for s in syms], *_probe_set(lam))
    keep = np.ones(len(stages[0]), dtype=bool)
    for lab, s in zip(labels, syms):
        keep &= lab == s.l
    return stages[0][keep]


def diameter(points) -> float:
    pts = np.asarray(points, dtype=complex)
    if pts.size == 0:
        return math.nan
    return float(np.max(np.abs(pts[:, None] - pts[None, :])))


def resolution_floor(points) -> float:
    """Smallest diameter the samples can resolve: RESOLUTION_ULPS ulps of their size."""
    pts = np.asarray(points, dtype=complex)
    return RESOLUTION_ULPS * EPS * float(np.max(np.abs(pts))) if pts.size else math.nan


def is_decreasing(diameters: Sequence[float], floors: Sequence[float]) -> bool:
    """Each diameter is below the previous one, unless it has reached its floor."""
    return all(b < a or b <= f for a, b, f in zip(diameters, diameters[1:], floors[1:]))


def cylinder_estimate(p, t: Itinerary, depth: int | None = None) -> tuple[complex, float]:
    """(center, diameter of the sampled cylinder) for ``t`` cut to ``depth`` symbols."""
    if not isinstance(t, Itinerary):
        t = Itinerary(t)
    center = point_from_itinerary(p, t, depth)
    syms = [s for s in t.symbols if s.l != 0]
    if depth is not None:
        syms = syms[:depth]
    return center, diameter(cylinder_points(p, syms))


def sample_word(p, depth: int, rng: np.random.Generator, max_index: int = 2) -> Itinerary:
    """A random admissible word: random regions, labels read off a cylinder point."""
    lam = as_lambda(p)
    regions = [int(v) for v in rng.integers(-max_index, max_index + 1, size=depth)]
    seed = _probe_candidates(lam)[int(rng.integers(4))]
    _, labels = _trace(lam, regions, [seed])
    return Itinerary((n, int(lab[0])) for n, lab in zip(regions, labels))


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def conjugacy_holds(p, z, depth: int) -> bool:
    """itinerary_of(f(z), depth-1) == shift(itinerary_of(z, depth))."""
    lam = as_lambda(p)
    left = itinerary_of(lam, evaluate(lam, z), depth - 1)
    return left == shift(itinerary_of(lam, z, depth))


@dataclass
class CantorReport:
    parameter: complex
    kappa: float
    depth: int
    max_index: int
    seed: int
    words: list[Itinerary]
    diameters: list[list[float]]
    monotone: list[bool]
    conjugacy_checked: int
    conjugacy_passed: int
    min_separation: float
    min_symbolic_distance: float

    @property
    def max_final_diameter(self) -> float:
        # an empty cylinder (NaN) counts as a failure
        return max(math.inf if math.isnan(d[-1]) else d[-1] for d in self.diameters)

    @property
    def all_monotone(self) -> bool:
        return all(self.monotone)

    def to_dict(self) -> dict:
        lam = self.parameter
        return {
            "parameter": {"re": lam.real, "im": lam.imag},
            "kappa": self.kappa,
            "depth": self.depth,
            "max_index": self.max_index,
            "seed": self.seed,
            "probes": {
                "circle_radius": probe_radius(lam),
                "circle_points": PROBE_COUNT,
                "ray_samples": RAY_SAMPLES,
                "ray_extent": RAY_EXTENT,
                "ray_angle": RAY_ANGLE,
            },
            "coding": {"boundary_snap": CODING_OFFSET, "axis_tol": CODING_AXIS_TOL},
            "tracing": {"track_tol": TRACK_TOL, "cut_push": CUT_PUSH, "resolution_ulps": RESOLUTION_ULPS},
            "words": [
                {"word": w.to_list(), "depths": list(range(1, len(d) + 1)), "diameters": d, "monotone": m}
                for w, d, m in zip(self.words, self.diameters, self.monotone)
            ],
            "max_final_diameter": self.max_final_diameter,
            "all_monotone": self.all_monotone,
            "conjugacy": {"checked": self.conjugacy_checked, "passed": self.conjugacy_passed},
            "min_separation": self.min_separation,
            "min_symbolic_distance": self.min_symbolic_distance,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def cantor_diagnostics(
    p,
    sample_words: int = 100,
    depth: int = 12,
    kappa: float = DEFAULT_KAPPA,
    seed: int = 0,
    max_index: int = 2,
    conjugacy_depth: int = 5,
) -> CantorReport:
    """Cylinder diameters, conjugacy checks and separation for random words."""
    lam = require_cantor_regime(p)
    if not kappa > 1:
        raise BadKappa(f"kappa must exceed 1, got {kappa!r}")
    rng = np.random.default_rng(seed)
    words = [sample_word(lam, depth, rng, max_index) for _ in range(sample_words)]

    diameters, monotone, finals = [], [], []
    for w in words:
        ds, floors = [], []
        for d in range(1, depth + 1):
            pts = cylinder_points(lam, w.symbols[:d])
            ds.append(diameter(pts))
            floors.append(resolution_floor(pts))
        finals.append(pts)
        diameters.append(ds)
        monotone.append(is_decreasing(ds, floors))

    checked = passed = 0
    seen = set()
    for w in words:
        for k in range(1, min(conjugacy_depth, depth) + 1):
            key = w.regions[:k]
            if key in seen:
                continue
            seen.add(key)
            checked += 1
            try:
                z = composed_inverse(lam, key[::-1], INF)
                t = itinerary_of(lam, z, k + 1)
                ok = t.terminated and t.regions == key and conjugacy_holds(lam, z, k + 1)
            except (InverseBranchError, LeftSymbolDomain):
                ok = False
            passed += ok

    sep = sym = math.inf
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            if words[i] == words[j] or not len(finals[i]) or not len(finals[j]):
                continue
            sep = min(sep, float(np.min(np.abs(finals[i][:, None] - finals[j][None, :]))))
            sym = min(sym, distance_kappa(words[i], words[j], kappa))
    return CantorReport(lam, float(kappa), depth, max_index, seed, words, diameters, monotone,
                        checked, passed, sep, sym)
