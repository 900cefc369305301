"""Rasters of the dynamical plane and the parameter plane.

Both scans cut the grid into fixed blocks of TILE_ROWS rows.  The blocks do
not depend on the worker count and each is computed the same way whichever
thread picks it up, so results are byte-identical for any number of workers.

Class ids:
    0        origin basin / ORIGIN_ONLY parameter
    1..253   basin of (or parameter with) an attracting cycle; the id is the
             period, capped at 253
    254      orbit reaches a pole or overflows
    255      undetermined
"""
from __future__ import annotations

import base64
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .classify import (
    CONVERGENCE_TOL,
    ORIGIN_RUN,
    ORIGIN_TOL,
    Verdict,
    classify_parameter,
    cycle_from_tail,
    tail_length,
    verdict_for_cycle,
)
from .mapcore import CONVERGENCE_RUN, EPS, as_lambda, modulus, step_array

CLASS_ORIGIN = 0
CLASS_ESCAPE = 254
CLASS_UNDETERMINED = 255
MAX_CYCLE_CLASS = 253

CYCLE_MATCH_TOL = 1e-4
DEFAULT_BUDGET = 2000
MIN_BUDGET = 50
TILE_ROWS = 8

CELL_DTYPE = np.dtype([("class_id", "u1"), ("period", "<u2"), ("steps", "<u4")])


class SeedUndetermined(ValueError):
    pass


def worker_count(workers: int | None = None) -> int:
    """Explicit count, else the THREADS environment variable, else the CPU count."""
    if workers is None:
        env = os.environ.get("THREADS", "").strip()
        workers = int(env) if env else (os.cpu_count() or 1)
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


@dataclass(frozen=True)
class GridSpec:
    """An affine pixel grid; pixel centres, row 0 at the top (largest Im)."""

    center: complex
    width: float
    height: float
    cols: int
    rows: int

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if self.cols < 1 or self.rows < 1:
            raise ValueError("cols and rows must be >= 1")
        if not (self.width > 0 and self.height > 0):
            raise ValueError("width and height must be positive")

    @classmethod
    def from_bounds(cls, xmin: float, ymin: float, xmax: float, ymax: float, cols: int, rows: int | None = None):
        rows = cols if rows is None else rows
        center = complex((xmin + xmax) / 2, (ymin + ymax) / 2)
        return cls(center, xmax - xmin, ymax - ymin, cols, rows)

    @property
    def dx(self) -> float:
        return self.width / self.cols

    @property
    def dy(self) -> float:
        return self.height / self.rows

    def coordinates(self, row_start: int = 0, row_stop: int | None = None) -> np.ndarray:
        """Pixel centres of rows [row_start, row_stop) as a complex array."""
        row_stop = self.rows if row_stop is None else row_stop
        # offsets from the centre are odd multiples of half a pixel, so a
        # window centred at 0 is mirror-symmetric to the bit
        i = np.arange(self.cols) + 0.5 - self.cols / 2
        j = np.arange(row_start, row_stop) + 0.5 - self.rows / 2
        x = self.center.real + i * self.dx
        y = self.center.imag - j * self.dy
        return x[None, :] + 1j * y[:, None]

    def pixel_of(self, z) -> tuple[int, int]:
        """(row, col) of the pixel containing z, clamped to the grid."""
        z = complex(z)
        col = int(np.floor((z.real - self.center.real) / self.dx + self.cols / 2))
        row = int(np.floor((self.center.imag - z.imag) / self.dy + self.rows / 2))
        return min(max(row, 0), self.rows - 1), min(max(col, 0), self.cols - 1)

    def to_dict(self) -> dict:
        c = self.center
        return {"center": [c.real, c.imag], "width": self.width, "height": self.height,
                "cols": self.cols, "rows": self.rows}

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        re, im = d["center"]
        return cls(complex(re, im), d["width"], d["height"], d["cols"], d["rows"])


@dataclass(eq=False)
class ClassifiedGrid:
    spec: GridSpec
    cells: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.asarray(self.cells).dtype != CELL_DTYPE:
            raise ValueError(f"cells must have dtype {CELL_DTYPE}")
        cells = np.ascontiguousarray(self.cells)
        if cells.shape != (self.spec.rows, self.spec.cols):
            raise ValueError(f"cells have shape {cells.shape}, grid is {(self.spec.rows, self.spec.cols)}")
        self.cells = cells

    @property
    def class_ids(self) -> np.ndarray:
        return self.cells["class_id"]

    @property
    def periods(self) -> np.ndarray:
        return self.cells["period"]

    @property
    def steps(self) -> np.ndarray:
        return self.cells["steps"]

    def tobytes(self) -> bytes:
        return self.cells.tobytes()

    def __eq__(self, other):
        if not isinstance(other, ClassifiedGrid):
            return NotImplemented
        return self.spec == other.spec and self.meta == other.meta and self.tobytes() == other.tobytes()

    def to_json(self) -> str:
        head = {
            "spec": self.spec.to_dict(),
            "meta": self.meta,
            "dtype": [[name, CELL_DTYPE[name].str] for name in CELL_DTYPE.names],
            "cells": base64.b64encode(self.tobytes()).decode("ascii"),
        }
        return json.dumps(head, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ClassifiedGrid":
        d = json.loads(text)
        spec = GridSpec.from_dict(d["spec"])
        raw = base64.b64decode(d["cells"])
        cells = np.frombuffer(raw, dtype=CELL_DTYPE).reshape(spec.rows, spec.cols)
        return cls(spec, cells.copy(), d.get("meta", {}))


def _run_tiles(spec: GridSpec, tile_fn, workers: int | None) -> np.ndarray:
    starts = range(0, spec.rows, TILE_ROWS)
    jobs = [(r, min(r + TILE_ROWS, spec.rows)) for r in starts]
    n = worker_count(workers)
    if n == 1:
        parts = [tile_fn(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            parts = list(pool.map(lambda job: tile_fn(*job), jobs))
    return np.concatenate(parts, axis=0)


def _check_budget(budget: int):
    if budget < MIN_BUDGET:
        raise ValueError(f"budget must be >= {MIN_BUDGET}")


# ---------------------------------------------------------------------------
# dynamical plane
# ---------------------------------------------------------------------------

def _dynamical_tile(lam: complex, z0: np.ndarray, budget: int, cycle_pts: np.ndarray, period: int) -> np.ndarray:
    out = np.zeros(z0.shape, dtype=CELL_DTYPE)
    out["class_id"] = CLASS_UNDETERMINED
    out["steps"] = budget
    flat = out.reshape(-1)
    idx = np.arange(z0.size)
    z = z0.reshape(-1).copy()
    err = EPS * modulus(z)
    cycle_class = min(period, MAX_CYCLE_CLASS)

    for step in range(0, budget + 1):
        done = np.zeros(idx.shape, dtype=bool)
        origin = modulus(z) < ORIGIN_TOL
        flat["class_id"][idx[origin]] = CLASS_ORIGIN
        flat["period"][idx[origin]] = 1
        done |= origin
        if cycle_pts.size:
            dist = np.min(modulus(z[:, None] - cycle_pts[None, :]), axis=1)
            hit = ~done & (dist < CYCLE_MATCH_TOL)
            flat["class_id"][idx[hit]] = cycle_class
            flat["period"][idx[hit]] = period
            done |= hit
        flat["steps"][idx[done]] = step
        keep = ~done
        idx, z, err = idx[keep], z[keep], err[keep]
        if idx.size == 0 or step == budget:
            break
        z, pole, overflow, err = step_array(lam, z, err)
        gone = pole | overflow
        flat["class_id"][idx[gone]] = CLASS_ESCAPE
        flat["steps"][idx[gone]] = step + 1
        keep = ~gone
        idx, z, err = idx[keep], z[keep], err[keep]
    return out


def scan_dynamical(p, spec: GridSpec, budget: int = DEFAULT_BUDGET, workers: int | None = None) -> ClassifiedGrid:
    """Fate of every pixel of the dynamical plane of f_lam.

    A pixel joins the origin basin once an iterate is within ORIGIN_TOL of 0,
    and the basin of the attracting cycle found by :func:`classify_parameter`
    once an iterate is within CYCLE_MATCH_TOL of a cycle point.
    """
    lam = as_lambda(p)
    _check_budget(budget)
    pc = classify_parameter(lam, max(budget, 100))
    if pc.verdict is Verdict.ATTRACTING_CYCLE:
        cycle_pts = np.array(pc.cycle.points, dtype=complex)
        period = pc.cycle.period
    else:
        cycle_pts, period = np.zeros(0, dtype=complex), 0

    def tile(r0, r1):
        return _dynamical_tile(lam, spec.coordinates(r0, r1), budget, cycle_pts, period)

    cells = _run_tiles(spec, tile, workers)
    meta = {
        "kind": "dynamical",
        "lambda": [lam.real, lam.imag],
        "budget": budget,
        "verdict": pc.verdict.value,
        "cycle_period": period,
        "origin_tol": ORIGIN_TOL,
        "cycle_match_tol": CYCLE_MATCH_TOL,
    }
    return ClassifiedGrid(spec, cells, meta)


# ---------------------------------------------------------------------------
# parameter plane
# ---------------------------------------------------------------------------

def _encode_class(pc) -> tuple[int, int]:
    if pc.verdict is Verdict.ORIGIN_ONLY:
        return CLASS_ORIGIN, 1
    if pc.verdict is Verdict.ATTRACTING_CYCLE:
        return min(pc.period, MAX_CYCLE_CLASS), pc.period
    if pc.verdict is Verdict.SINGULAR_ESCAPE:
        return CLASS_ESCAPE, 0
    return CLASS_UNDETERMINED, 0


def _parameter_tile(lam_grid: np.ndarray, budget: int) -> np.ndarray:
    """Verdicts of classify_parameter for a block of parameters.

    The orbits of lam*i are run side by side with the same arithmetic and
    stopping rules as the scalar iteration, then the same cycle detection is
    applied to each stored orbit.
    """
    out = np.zeros(lam_grid.shape, dtype=CELL_DTYPE)
    out["class_id"] = CLASS_UNDETERMINED
    flat = out.reshape(-1)
    lam_all = lam_grid.reshape(-1)
    idx = np.flatnonzero(lam_all != 0)
    lam = lam_all[idx]
    z = np.empty(lam.shape, dtype=complex)
    z.real, z.imag = -lam.imag, lam.real
    hist = np.empty((lam_all.size, budget + 1), dtype=complex)
    hist[idx, 0] = z
    length = np.zeros(lam_all.size, dtype=np.int64)
    err = EPS * modulus(z)
    near = (modulus(z) < ORIGIN_TOL).astype(np.int64)
    run = np.zeros(idx.shape, dtype=np.int64)

    for step in range(1, budget + 1):
        if idx.size == 0:
            break
        z_next, pole, overflow, err = step_array(lam, z, err)
        gone = pole | overflow
        flat["class_id"][idx[gone]] = CLASS_ESCAPE
        flat["steps"][idx[gone]] = step
        run = np.where(modulus(z_next - z) < CONVERGENCE_TOL, run + 1, 0)
        near = np.where(modulus(z_next) < ORIGIN_TOL, near + 1, 0)
        captured = ~gone & (near >= ORIGIN_RUN)
        flat["class_id"][idx[captured]] = CLASS_ORIGIN
        flat["period"][idx[captured]] = 1
        flat["steps"][idx[captured]] = step
        hist[idx, step] = z_next
        stopped = ~gone & ~captured & ((run >= CONVERGENCE_RUN) | (step == budget))
        length[idx[stopped]] = step + 1
        keep = ~(gone | captured | stopped)
        idx, lam, z, err, near, run = idx[keep], lam[keep], z_next[keep], err[keep], near[keep], run[keep]

    for k in np.flatnonzero(length):
        n = int(length[k])
        cycle = cycle_from_tail(complex(lam_all[k]), hist[k, n - tail_length(n): n])
        verdict = verdict_for_cycle(cycle)
        if verdict is Verdict.ATTRACTING_CYCLE:
            flat["class_id"][k] = min(cycle.period, MAX_CYCLE_CLASS)
            flat["period"][k] = cycle.period
        elif verdict is Verdict.ORIGIN_ONLY:
            flat["class_id"][k] = CLASS_ORIGIN
            flat["period"][k] = 1
        flat["steps"][k] = n - 1
    return out


def scan_parameter(spec: GridSpec, budget: int = DEFAULT_BUDGET, workers: int | None = None) -> ClassifiedGrid:
    """Verdict of :func:`classify_parameter` at every pixel of the lam-plane.

    A pixel centred exactly at lam = 0 is marked undetermined.
    """
    if budget < 100:
        raise ValueError("budget must be >= 100")

    def tile(r0, r1):
        return _parameter_tile(spec.coordinates(r0, r1), budget)

    cells = _run_tiles(spec, tile, workers)
    meta = {"kind": "parameter", "budget": budget, "origin_tol": ORIGIN_TOL, "origin_run": ORIGIN_RUN}
    return ClassifiedGrid(spec, cells, meta)


# ---------------------------------------------------------------------------
# components
# ---------------------------------------------------------------------------

def flood_component(grid: ClassifiedGrid, seed_pixel: tuple[int, int]) -> np.ndarray:
    """4-connected component of the seed's class containing the seed, as a boolean mask."""
    r, c = seed_pixel
    cls = grid.class_ids[r, c]
    if cls == CLASS_UNDETERMINED:
        raise SeedUndetermined(f"seed pixel {seed_pixel} is undetermined")
    labels, _ = ndimage.label(grid.class_ids == cls)  # default structure is 4-connected
    return labels == labels[r, c]


def immediate_basin_evidence(grid: ClassifiedGrid, lam) -> dict:
    """Grid heuristic: do the pixels of 0 and +-lam*i share one origin-basin component?

    This is evidence only; a raster cannot certify that the asymptotic values
    lie in the immediate basin.
    """
    lam = as_lambda(lam)
    spec = grid.spec
    seeds = {"origin": 0j, "plus_lam_i": 1j * lam, "minus_lam_i": -1j * lam}
    pix = {k: spec.pixel_of(v) for k, v in seeds.items()}
    classes = {k: int(grid.class_ids[p]) for k, p in pix.items()}
    same = False
    if classes["origin"] == CLASS_ORIGIN:
        mask = flood_component(grid, pix["origin"])
        same = bool(mask[pix["plus_lam_i"]] and mask[pix["minus_lam_i"]])
    return {
        "heuristic": "grid heuristic (4-connected flood fill); evidence only, cannot certify the immediate basin",
        "resolution": [spec.cols, spec.rows],
        "window": spec.to_dict(),
        "pixels": {k: list(v) for k, v in pix.items()},
        "classes": classes,
        "same_component": same,
    }
