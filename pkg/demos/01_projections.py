"""Shape-restricted projections and their piece structure.

Projects noisy data onto the monotone and convex-sequence cones and
shows how the fits organize themselves into constant blocks (monotone)
or affine segments (convex).  The piece counts printed here are the
quantities that drive every confidence radius in the package.
"""

import numpy as np

from shapeconf import (
    ConeKind,
    bounded_isotonic_projection,
    convex_projection,
    isotonic_projection,
    piece_count_convex,
    piece_count_monotone,
    project,
)

rng = np.random.default_rng(7)

print("=== isotonic projection ===")
truth = np.repeat([0.0, 1.0, 3.0], 6)  # three-level staircase
y = truth + 0.4 * rng.standard_normal(truth.size)
fit = isotonic_projection(y)
count, structure = piece_count_monotone(fit)
print(f"data        : {np.round(y, 2)}")
print(f"fit         : {np.round(fit, 2)}")
print(f"pieces      : {count} (true staircase has 3 levels)")
print(f"blocks      : {structure.ranges}")

print()
print("=== bounded isotonic projection ===")
# the same fit, forced to stay within [0.2, 2.5]: the solution simply
# clips the unconstrained one, which can only merge pieces
clipped = bounded_isotonic_projection(y, lower=0.2, upper=2.5)
print(f"clipped fit : {np.round(clipped, 2)}")
print(f"pieces      : {piece_count_monotone(clipped)[0]} <= {count}")

print()
print("=== convex projection ===")
grid = np.linspace(-1.0, 1.0, 15)
truth = 2.0 * grid**2  # a smooth convex signal
y = truth + 0.3 * rng.standard_normal(grid.size)
fit = convex_projection(y)
count, structure = piece_count_convex(fit)
second = np.diff(fit, 2)
print(f"fit         : {np.round(fit, 2)}")
print(f"affine segments: {count}, ranges {structure.ranges}")
print(f"min second difference: {second.min():.2e} (feasible: >= 0 up to rounding)")

print()
print("=== the sign-flipped cones ===")
y = np.array([1.0, 2.0, 0.5, 0.2])
print(f"nonincreasing fit of {y}: {project(ConeKind.MONOTONE_NONINCREASING, y)}")
y = np.array([0.0, 0.5, 1.8, 1.1, 0.1])
print(f"concave fit of {y}: {np.round(project(ConeKind.CONCAVE, y), 3)}")
