"""Binary PPM output for classified grids."""
from __future__ import annotations

import colorsys
import os

import numpy as np

from .scan import CLASS_ESCAPE, CLASS_ORIGIN, CLASS_UNDETERMINED, MAX_CYCLE_CLASS, ClassifiedGrid

WHITE = (255, 255, 255)
BLACK = (0, 0, 0)
GRAY = (128, 128, 128)
HUE_STEP = 0.618033988749895  # golden ratio conjugate spreads consecutive periods apart
SHADE_FLOOR = 0.0


class IoFailure(OSError):
    pass


def period_color(period: int) -> tuple[int, int, int]:
    h = (period * HUE_STEP) % 1.0
    r, g, b = colorsys.hsv_to_rgb(h, 0.75, 0.95)
    return int(round(255 * r)), int(round(255 * g)), int(round(255 * b))


def default_palette() -> dict[int, tuple[int, int, int]]:
    """Origin white, cycles coloured by period, escape black, undetermined gray."""
    pal = {CLASS_ORIGIN: WHITE, CLASS_ESCAPE: BLACK, CLASS_UNDETERMINED: GRAY}
    for p in range(1, MAX_CYCLE_CLASS + 1):
        pal[p] = period_color(p)
    return pal


def step_shading(steps: np.ndarray, classes: np.ndarray) -> np.ndarray:
    """Brightness factors in [SHADE_FLOOR, 1] darkening slow pixels.

    Within each class, pixels no slower than the median keep full
    brightness and slower ones fade towards black with the excess steps.  Pixel
    centres almost never sit on the Julia set itself, so this is what makes
    it visible as the dark boundary between fast-converging regions.
    """
    out = np.ones(steps.shape, dtype=float)
    for c in np.unique(classes):
        if c in (CLASS_ESCAPE, CLASS_UNDETERMINED):
            continue
        m = classes == c
        s = steps[m].astype(float)
        lo, hi = np.median(s), s.max()
        if hi > lo:
            t = np.sqrt(np.clip((s - lo) / (hi - lo), 0.0, 1.0))
            out[m] = 1.0 - (1.0 - SHADE_FLOOR) * t
    return out


def render(grid: ClassifiedGrid, palette: dict | None = None, shade: bool = False) -> np.ndarray:
    """(rows, cols, 3) uint8 image; raises IoFailure if the palette misses a class."""
    palette = default_palette() if palette is None else palette
    classes = grid.class_ids
    present = [int(c) for c in np.unique(classes)]
    missing = [c for c in present if c not in palette]
    if missing:
        raise IoFailure(f"palette has no colour for class ids {missing}")
    lut = np.zeros((256, 3), dtype=float)
    for c in present:
        lut[c] = palette[c]
    rgb = lut[classes]
    if shade:
        rgb = rgb * step_shading(grid.steps, classes)[..., None]
    return np.clip(np.rint(rgb), 0, 255).astype(np.uint8)


def ppm_bytes(image: np.ndarray) -> bytes:
    rows, cols, _ = image.shape
    return f"P6\n{cols} {rows}\n255\n".encode("ascii") + np.ascontiguousarray(image).tobytes()


def write_ppm(grid: ClassifiedGrid, palette: dict | None, path, shade: bool = False) -> None:
    """Write ``grid`` as a binary P6 image, row 0 first.

    The palette is checked before the file is opened, so a missing class
    leaves nothing on disk.
    """
    data = ppm_bytes(render(grid, palette, shade))
    try:
        with open(os.fspath(path), "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
