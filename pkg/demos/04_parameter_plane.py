"""The parameter plane: where is the Julia set a Cantor set?

Every lam is classified by the fate of the single singular orbit of lam*i.
The white centre is the component where both asymptotic values fall into
the origin; coloured pixels carry an attracting cycle, by period.

Run:  python3 demos/04_parameter_plane.py [--out DIR] [--res N]
"""
import argparse
import os

import numpy as np

from tanfamily import GridSpec, classify_parameter, scan_parameter, write_ppm

ap = argparse.ArgumentParser()
ap.add_argument("--out", default=".")
ap.add_argument("--res", type=int, default=128)
args = ap.parse_args()

spec = GridSpec.from_bounds(-2.5, -2.5, 2.5, 2.5, args.res)
grid = scan_parameter(spec, 2000)
path = os.path.join(args.out, "parameter_plane.ppm")
write_ppm(grid, None, path)
print(f"wrote {path}")

ids, counts = np.unique(grid.class_ids, return_counts=True)
names = {0: "origin only", 254: "singular escape", 255: "undetermined"}
for i, c in zip(ids, counts):
    print(f"  {names.get(int(i), f'period {i}'):>16}: {c} pixels")

ids = grid.class_ids
print("\nsymmetric under lam -> -lam:", np.array_equal(ids, ids[::-1, ::-1]))
print("symmetric under lam -> conj lam:", np.array_equal(ids, ids[::-1, :]))
print("symmetric under lam -> i lam:", np.array_equal(ids, np.rot90(ids)))

for lam in (0.85, 1.35 + 0.3j, 2.0):
    pc = classify_parameter(lam)
    extra = f", cycle period {pc.cycle.period}, |multiplier| {abs(pc.cycle.multiplier):.3f}" if pc.cycle else ""
    print(f"lam = {lam}: {pc.verdict.value}{extra}")
