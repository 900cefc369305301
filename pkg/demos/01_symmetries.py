"""Symmetries of lam*tan(z^2), checked on one orbit.

Run:  python3 demos/01_symmetries.py
"""
import numpy as np

from tanfamily import evaluate, iterate
from tanfamily.mapcore import orbit_derivative

lam, z = 0.6 + 0.2j, 0.9 - 0.4j
k = 5
base = iterate(lam, z, k, convergence_tol=0.0).points
print(f"orbit of z = {z} under lam = {lam}:")
for j, w in enumerate(base):
    print(f"  f^{j}(z) = {w:.12f}")

# f is even, so -z follows the same orbit from step 1 on
even = iterate(lam, -z, k, 0.0).points
print("\nf^k(-z) == f^k(z):", np.array_equal(even[1:], base[1:]))

conj = iterate(lam.conjugate(), z.conjugate(), k, 0.0).points
print("f_{conj lam}^k(conj z) == conj f_lam^k(z):", np.array_equal(conj, base.conj()))

neg = iterate(-lam, z, k, 0.0).points
print("f_{-lam}^k(z) == -f_lam^k(z):", np.array_equal(neg[1:], -base[1:]))

# rotating lam by i: the first step picks up +i, every later one -i
rot = iterate(1j * lam, z, k, 0.0).points
print("\nratio f_{i lam}^k(z) / f_lam^k(z):")
for j in range(1, k + 1):
    print(f"  k = {j}: {rot[j] / base[j]:.3f}")

# derivative of the iterates: odd in z, conjugate-equivariant, odd in lam
for j in (1, 3, 5):
    g = orbit_derivative(lam, z, j)
    print(f"\n(f^{j})'(z) = {g:.6g}")
    print(f"  (f^{j})'(-z) = {orbit_derivative(lam, -z, j):.6g}")
    print(f"  (f_{{-lam}}^{j})'(z) = {orbit_derivative(-lam, z, j):.6g}")

print("\nf(0) =", evaluate(lam, 0), "(the origin is fixed and super-attracting)")
