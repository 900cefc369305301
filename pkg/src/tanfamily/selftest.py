"""Invariant suites shared by the ``selftest`` command and the test-suite.

Every suite returns a :class:`CheckResult`; sample counts are arguments so
the command line can run quick versions of the same checks.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from .classify import Verdict, classify_parameter
from .inverse import InverseBranchError, inverse_branch, pre_pole
from .lattice import region_of
from .mapcore import Fate, derivative, evaluate, is_infinite, iterate, orbit_derivative
from .scan import GridSpec, scan_dynamical, scan_parameter
from .symbolic import Itinerary, conjugacy_holds, distance_kappa, itinerary_of, shift

SYMMETRY_TOL = 1e-9
FD_STEP = 1e-6
FD_TOL = 1e-5
ROUND_TRIP_TOL = 1e-9
FIG2_LAMBDA = 0.85
# finite differences are meaningless right next to a pole
FD_POLE_CLEARANCE = 1e-2
ORBIT_CAP = 1e6
# kappa * kappa**-i and kappa**-(i-1) may differ in the last bit
METRIC_ULPS = 4


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} ({self.seconds:.2f} s)"


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        res = fn(*args, **kw)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _rel(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def _orbit(lam: complex, z: complex, k: int) -> list[complex] | None:
    pts = [z]
    for _ in range(k):
        w = evaluate(lam, pts[-1])
        if is_infinite(w) or abs(w) > ORBIT_CAP:
            return None
        pts.append(w)
    return pts


def rotation_sign(k: int, sign: int = 1) -> complex:
    """Factor c with f_{sign*i*lam}^k = c * f_lam^k.

    Direct computation: +i at k = 1 and -i from k = 2 on for lam*i; the
    conjugate pattern (-i, then +i) for -lam*i.
    """
    c = 1j if k == 1 else -1j
    return c if sign > 0 else -c


def random_pairs(rng: np.random.Generator, n: int, box: float = 1.5):
    lam = rng.uniform(-box, box, (n, 2)) @ np.array([1, 1j])
    z = rng.uniform(-box, box, (n, 2)) @ np.array([1, 1j])
    return [complex(a) for a in lam], [complex(b) for b in z]


@_timed
def symmetry_suite(samples: int = 1000, depth: int = 5, seed: int = 0) -> CheckResult:
    """Evenness, conjugation, negation and rotation of the iterates."""
    rng = np.random.default_rng(seed)
    used = attempts = 0
    worst = 0.0
    while used < samples and attempts < 20 * samples:
        attempts += 1
        (lam,), (z,) = random_pairs(rng, 1)
        base = _orbit(lam, z, depth)
        others = [
            _orbit(lam, -z, depth),
            _orbit(lam.conjugate(), z.conjugate(), depth),
            _orbit(-lam, z, depth),
            _orbit(1j * lam, z, depth),
            _orbit(-1j * lam, z, depth),
        ]
        if base is None or any(o is None for o in others):
            continue
        used += 1
        ev, cj, ng, rp, rm = others
        for k in range(1, depth + 1):
            w = base[k]
            worst = max(
                worst,
                _rel(ev[k], w),
                _rel(cj[k], w.conjugate()),
                _rel(ng[k], -w),
                _rel(rp[k], rotation_sign(k, +1) * w),
                _rel(rm[k], rotation_sign(k, -1) * w),
            )
    ok = used == samples and worst < SYMMETRY_TOL
    return CheckResult("symmetry", ok, f"{used} pairs, k <= {depth}, worst relative error {worst:.3g}")


@_timed
def derivative_suite(samples: int = 1000, depth: int = 5, seed: int = 1) -> CheckResult:
    """Closed form against central differences, and the derivative symmetries."""
    rng = np.random.default_rng(seed)
    fd_worst = sym_worst = 0.0
    used = attempts = 0
    h = FD_STEP
    while used < samples and attempts < 20 * samples:
        attempts += 1
        (lam,), (z,) = random_pairs(rng, 1)
        if abs(np.cos(z * z)) < FD_POLE_CLEARANCE:
            continue
        if _orbit(lam, z, depth) is None:
            continue
        used += 1
        d = derivative(lam, z)
        fd = (evaluate(lam, z + h) - evaluate(lam, z - h)) / (2 * h)
        if d != 0:
            fd_worst = max(fd_worst, abs(d - fd) / abs(d))
        for k in range(1, depth + 1):
            g = orbit_derivative(lam, z, k)
            # z -> f^k(-z) has derivative -(f^k)'(-z)
            sym_worst = max(
                sym_worst,
                _rel(-orbit_derivative(lam, -z, k), g),
                _rel(orbit_derivative(lam.conjugate(), z.conjugate(), k), g.conjugate()),
                _rel(orbit_derivative(-lam, z, k), -g),
            )
    ok = used == samples and fd_worst < FD_TOL and sym_worst < SYMMETRY_TOL
    return CheckResult(
        "derivative",
        ok,
        f"{used} samples, finite-difference worst {fd_worst:.3g}, symmetry worst {sym_worst:.3g}",
    )


@_timed
def inverse_suite(samples: int = 1000, max_branch: int = 4, max_depth: int = 5, seed: int = 2,
                  prepole_branch: int = 1) -> CheckResult:
    """Round trips through every branch, exact landing, and pre-pole timing."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    bad_region = 0
    branches = range(-max_branch, max_branch + 1)
    lams, zs = random_pairs(rng, samples, box=2.0)
    for lam, z in zip(lams, zs):
        for n in branches:
            w = inverse_branch(lam, n, z)
            worst = max(worst, _rel(evaluate(lam, w), z))
            bad_region += region_of(w) != n

    bad_pole = checked = 0
    lam = FIG2_LAMBDA
    idx = range(-prepole_branch, prepole_branch + 1)
    for depth in range(1, max_depth + 1):
        for key in itertools.product(idx, repeat=depth):
            checked += 1
            try:
                z = pre_pole(lam, key)
            except InverseBranchError:
                bad_pole += 1
                continue
            orb = iterate(lam, z, depth + 2, convergence_tol=0.0)
            bad_pole += not (orb.fate is Fate.HIT_POLE and orb.stop_step == depth)
    ok = worst < ROUND_TRIP_TOL and bad_region == 0 and bad_pole == 0
    return CheckResult(
        "inverse",
        ok,
        f"{samples} targets x {len(branches)} branches, worst round trip {worst:.3g}, "
        f"{bad_region} wrong regions; {checked} pre-poles, {bad_pole} off schedule",
    )


@_timed
def conjugacy_suite(max_depth: int = 5, max_branch: int = 2, lam: complex = FIG2_LAMBDA) -> CheckResult:
    """itinerary_of(f(z)) == shift(itinerary_of(z)) on every pre-pole of the grid of keys."""
    failures = checked = 0
    idx = range(-max_branch, max_branch + 1)
    for depth in range(1, max_depth + 1):
        for key in itertools.product(idx, repeat=depth):
            z = pre_pole(lam, key)
            checked += 1
            t = itinerary_of(lam, z, depth + 1)
            ok = t.terminated and t.regions == tuple(reversed(key)) and conjugacy_holds(lam, z, depth + 1)
            failures += not ok
    return CheckResult("conjugacy", failures == 0, f"{checked} pre-poles, {failures} mismatches")


def random_word(rng: np.random.Generator, length: int, max_index: int = 2) -> Itinerary:
    regions = rng.integers(-max_index, max_index + 1, size=length)
    labels = rng.integers(1, 5, size=length)
    return Itinerary(zip(regions.tolist(), labels.tolist()))


def _related_words(rng: np.random.Generator, n: int, length: int = 8):
    # words sharing random prefixes so that all distance values occur
    base = random_word(rng, length, 1)
    out = []
    for _ in range(n):
        cut = int(rng.integers(0, length + 1))
        tail = random_word(rng, length - cut, 1).symbols if cut < length else ()
        out.append(Itinerary(base.symbols[:cut] + tail))
    return out


@_timed
def metric_suite(samples: int = 10_000, kappas=(1.5, 2.0, 4.0), seed: int = 3) -> CheckResult:
    """Symmetry, triangle inequality and the shift Lipschitz bound of d_kappa."""
    rng = np.random.default_rng(seed)
    bad = {"symmetry": 0, "triangle": 0, "shift": 0}
    for kappa in kappas:
        for _ in range(samples):
            s, t, u = _related_words(rng, 3)
            dst, dts = distance_kappa(s, t, kappa), distance_kappa(t, s, kappa)
            bad["symmetry"] += dst != dts
            bad["triangle"] += dst > distance_kappa(s, u, kappa) + distance_kappa(u, t, kappa)
            if len(s) > 1 and len(t) > 1:
                bound = kappa * dst * (1 + METRIC_ULPS * np.finfo(float).eps)
                bad["shift"] += distance_kappa(shift(s), shift(t), kappa) > bound
    ok = not any(bad.values())
    return CheckResult("metric", ok, f"{samples} triples per kappa in {list(kappas)}, violations {dict((k, int(v)) for k, v in bad.items())}")


@_timed
def determinism_suite(res: int = 48, worker_counts=(1, 2, 4)) -> CheckResult:
    """Scans are byte-identical for every worker count."""
    dyn = GridSpec.from_bounds(-3, -3, 3, 3, res)
    par = GridSpec.from_bounds(-2, -2, 2, 2, max(res // 4, 4))
    ref_d = scan_dynamical(FIG2_LAMBDA, dyn, 300, workers=worker_counts[0]).tobytes()
    ref_p = scan_parameter(par, 300, workers=worker_counts[0]).tobytes()
    same = all(
        scan_dynamical(FIG2_LAMBDA, dyn, 300, workers=w).tobytes() == ref_d
        and scan_parameter(par, 300, workers=w).tobytes() == ref_p
        for w in worker_counts[1:]
    )
    return CheckResult("determinism", same, f"workers {list(worker_counts)}")


@_timed
def regime_suite(lam: complex = FIG2_LAMBDA) -> CheckResult:
    """The reference parameter 0.85 lies in the Cantor regime."""
    v = classify_parameter(lam).verdict
    return CheckResult("regime", v is Verdict.ORIGIN_ONLY, f"lam = {lam}: {v.value}")


def quick_suites() -> list:
    return [
        lambda: symmetry_suite(200),
        lambda: derivative_suite(200),
        lambda: inverse_suite(200),
        lambda: conjugacy_suite(4),
        lambda: metric_suite(1000),
        lambda: regime_suite(),
        lambda: determinism_suite(),
    ]


def run_selftest(write=print) -> bool:
    results = []
    for suite in quick_suites():
        r = suite()
        write(r.line())
        results.append(r)
    return all(r.passed for r in results)
