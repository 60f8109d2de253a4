"""Seeded Monte Carlo experiments: coverage and adaptivity end to end.

Runs the full harness on desk-scale designs: the confidence balls must
cover the truth at least at their nominal level (they are conservative,
so empirical coverage is usually near 1), and the fitted piece counts
must stay below the adaptive bounds driven by the true complexity.
Everything is reproducible: the reports depend only on the config.
"""

import numpy as np

from shapeconf import (
    ConeKind,
    ExperimentConfig,
    SignalFamily,
    SignalSpec,
    run_adaptivity,
    run_coverage,
)

print("=== coverage of the piece-count ball (monotone, n=200, k=3) ===")
config = ExperimentConfig(
    signal=SignalSpec(SignalFamily.PIECEWISE_CONSTANT, n=200, complexity=3, amplitude=1.0),
    cone=ConeKind.MONOTONE_NONDECREASING,
    sigma=1.0,
    alpha=0.1,
    replicates=500,
    master_seed=17,
)
result = run_coverage(config)
print(f"empirical coverage : {result.coverage:.4f} (nominal >= {1 - config.alpha})")
print(f"mean squared radius: {result.mean_squared_radius:.4f} "
      f"(90% quantile {result.q90_squared_radius:.4f})")
print(f"mean loss          : {np.mean(result.loss):.4f}")
print(f"mean fitted pieces : {result.mean_pieces:.2f} (truth has 3)")

print()
print("=== the same design with the total-variation combination ===")
combined = run_coverage(
    ExperimentConfig(
        signal=config.signal,
        cone=config.cone,
        sigma=config.sigma,
        alpha=config.alpha,
        replicates=500,
        master_seed=17,
        use_tv_combination=True,
    )
)
print(f"empirical coverage : {combined.coverage:.4f} (nominal >= {1 - 2 * config.alpha})")
print(f"mean squared radius: {combined.mean_squared_radius:.4f} "
      f"(vs {result.mean_squared_radius:.4f} without the combination)")

print()
print("=== adaptivity of the fitted piece count (monotone) ===")
for n, k in [(100, 1), (100, 4)]:
    report = run_adaptivity(
        ExperimentConfig(
            signal=SignalSpec(SignalFamily.PIECEWISE_CONSTANT, n=n, complexity=k, amplitude=1.0),
            cone=ConeKind.MONOTONE_NONDECREASING,
            sigma=1.0,
            alpha=0.1,
            replicates=500,
            master_seed=19,
        )
    )
    print(f"n={n}, true pieces {k}: mean fitted pieces {report.mean_pieces:.2f} "
          f"<= bound {report.expected_pieces_bound:.2f}")
    for row in report.deviation:
        print(f"   exceedance of the {row.gamma}-level deviation bound "
              f"({row.bound:.1f}): {row.frequency:.4f}")

print()
print("=== adaptivity for the convex cone ===")
report = run_adaptivity(
    ExperimentConfig(
        signal=SignalSpec(SignalFamily.PIECEWISE_AFFINE, n=100, complexity=2, amplitude=1.0),
        cone=ConeKind.CONVEX,
        sigma=1.0,
        alpha=0.1,
        replicates=300,
        master_seed=23,
    )
)
print(f"n=100, true affine pieces 2: mean fitted pieces {report.mean_pieces:.2f} "
      f"<= bound {report.expected_pieces_bound:.2f}")
print(f"mean radius / (sigma^2 k / n): {report.mean_radius_ratio:.1f} "
      f"(the adaptive price is logarithmic)")
