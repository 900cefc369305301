"""Inverse branches, regions and pre-poles.

Each region L_n is mapped one-to-one onto the sphere minus the asymptotic
values +-lam*i, so every target has exactly one preimage per region.

Run:  python3 demos/02_inverse_branches.py
"""
import itertools

from tanfamily import evaluate, inverse_branch, iterate, pole, pre_pole, region_of, zero
from tanfamily.mapcore import Fate

lam = 0.85
target = 0.5 + 0.5j
print(f"preimages of {target} under lam*tan(z^2), lam = {lam}")
for n in range(-4, 5):
    w = inverse_branch(lam, n, target)
    print(f"  L_{n:+d}: w = {w:.10f}   region_of(w) = {region_of(w):+d}   |f(w) - target| = {abs(evaluate(lam, w) - target):.1e}")

print("\nzeros and poles on the lattice:")
for n in range(-3, 4):
    print(f"  n = {n:+d}: q_n = {zero(n):.6f}   s_n = {pole(n):.6f}")

# a key lists branches in the order they are applied; the pre-pole then
# walks the regions of the key backwards and lands on a pole
key = (1, -2, 0)
z = pre_pole(lam, key)
orb = iterate(lam, z, 10, 0.0)
print(f"\npre-pole for key {key}: {z:.12f}")
print("  regions along the orbit:", [region_of(complex(p)) for p in orb.points[:-1]])
print(f"  fate {orb.fate.value} at step {orb.stop_step}")

hits = total = 0
for depth in range(1, 5):
    for key in itertools.product(range(-2, 3), repeat=depth):
        orb = iterate(lam, pre_pole(lam, key), depth + 2, 0.0)
        total += 1
        hits += orb.fate is Fate.HIT_POLE and orb.stop_step == depth
print(f"\n{hits}/{total} pre-poles of depth <= 4 reach infinity on schedule")
