"""Cone geometry: statistical dimension, face dimensions, degrees of freedom.

The statistical dimension generalizes linear dimension to cones: it is
the expected squared norm of the projection of a standard Gaussian
vector.  For the monotone cone it equals the harmonic number H_n
exactly, which this script verifies by Monte Carlo, along with the
identity between the expected face dimension and the statistical
dimension and the divergence identity for the convex projection.
"""

import numpy as np

from shapeconf import (
    ConeKind,
    check_face_dimension_concentration,
    check_norm_concentration,
    convex_projection,
    divergence_fd,
    piece_count_convex,
    sample_face_dimensions,
    statistical_dimension_exact_isotonic,
    statistical_dimension_mc,
)

MONOTONE = ConeKind.MONOTONE_NONDECREASING

print("=== statistical dimension of the monotone cone ===")
for n in (3, 10, 50):
    exact = statistical_dimension_exact_isotonic(n)
    estimate = statistical_dimension_mc(MONOTONE, n, replicates=20000, seed=5)
    print(f"n={n:3d}: H_n = {exact:.4f}, Monte Carlo = {estimate.mean:.4f} "
          f"+/- {estimate.std_error:.4f}")

print()
print("=== the convex cone is even smaller ===")
estimate = statistical_dimension_mc(ConeKind.CONVEX, 100, replicates=2000, seed=5)
print(f"n=100: Monte Carlo = {estimate.mean:.3f} "
      f"(upper bound 10 ln(100 e) = {10 * np.log(100 * np.e):.3f})")

print()
print("=== face dimensions and their concentration ===")
n = 50
sample = sample_face_dimensions(MONOTONE, n, replicates=20000, seed=11)
delta = statistical_dimension_exact_isotonic(n)
print(f"mean face dimension = {np.mean(sample.dimensions):.4f} vs delta = {delta:.4f}")
print(f"smallest sampled dimension = {sample.dimensions.min()} (the cone has no 0-face)")
print("tail of the face dimension vs the exp(-x) bound:")
for row in check_face_dimension_concentration(sample, delta, [0.5, 1.0, 2.0]):
    print(f"  x={row.parameter}: frequency {row.frequency:.4f} <= bound {row.bound:.4f}")
print("tail of the squared projection norm vs its high-probability bound:")
for row in check_norm_concentration(MONOTONE, n, 20000, seed=11, alphas=(0.1, 0.05)):
    print(f"  alpha={row.parameter}: frequency {row.frequency:.4f} <= {row.bound:.4f}")

print()
print("=== divergence of the convex projection ===")
# the trace of the projection Jacobian (its degrees of freedom) equals
# the fitted affine-piece count plus one, almost surely
rng = np.random.default_rng(13)
for _ in range(5):
    y = rng.standard_normal(20)
    q_hat, _ = piece_count_convex(convex_projection(y))
    print(f"  fitted pieces + 1 = {q_hat + 1}, finite-difference divergence = "
          f"{divergence_fd(y):.6f}")
