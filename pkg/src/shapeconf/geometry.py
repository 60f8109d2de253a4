"""Cone geometry: statistical dimension, face dimensions, concentration.

The statistical dimension of a cone is the expected squared norm of the
projection of a standard Gaussian vector onto it.  For the monotone cone
it equals the harmonic number H_n exactly; elsewhere it is estimated by
Monte Carlo.  Projecting a Gaussian also induces a random face
dimension, whose distribution is checked here against its concentration
bound, and the divergence (trace of the projection Jacobian) ties the
convex fit's piece count to its degrees of freedom.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .cones import (
    ConeKind,
    NumericalError,
    as_sequence,
    convex_projection,
    piece_count,
    piece_count_convex,
    project,
)
from .streams import replicate_stream, run_index_chunks

__all__ = [
    "DimensionEstimate",
    "FaceDimensionSample",
    "TailBoundCheck",
    "statistical_dimension_exact_isotonic",
    "statistical_dimension_mc",
    "sample_face_dimensions",
    "check_face_dimension_concentration",
    "check_norm_concentration",
    "divergence_fd",
]


@dataclass(frozen=True)
class DimensionEstimate:
    """Monte Carlo estimate of a statistical dimension."""

    mean: float
    std_error: float
    replicates: int
    seed: int

    def __post_init__(self):
        if self.mean < 0.0 or self.std_error < 0.0:
            raise ValueError("mean and std_error must be nonnegative")


@dataclass(frozen=True)
class FaceDimensionSample:
    """Sampled dimensions of the faces hit by projected Gaussian vectors."""

    dimensions: np.ndarray
    n_points: int

    def __post_init__(self):
        dims = np.asarray(self.dimensions)
        if dims.size and (dims.min() < 0 or dims.max() > self.n_points):
            raise ValueError(f"face dimensions must lie in [0, {self.n_points}]")


@dataclass(frozen=True)
class TailBoundCheck:
    """One row of an empirical-frequency-versus-bound comparison.

    ``violated`` flags an empirical frequency exceeding the bound by
    more than three binomial standard errors.
    """

    parameter: float
    threshold: float
    frequency: float
    bound: float
    std_error: float
    violated: bool


def statistical_dimension_exact_isotonic(n: int) -> float:
    """Exact statistical dimension of the monotone cone: the harmonic number H_n."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return float(np.sum(1.0 / np.arange(1, n + 1)))


def _face_dimension(cone: ConeKind, pieces: int, n: int) -> int:
    # monotone: a fit with d constant pieces sits in the relative interior
    # of a d-dimensional face; convex: affine pieces + 1 for n >= 3 (the
    # divergence identity), full space for n <= 2.
    if cone.is_monotone:
        return pieces
    if n == 1:
        return 1
    return pieces + 1


def _geometry_replicate(cone: ConeKind, n: int, seed: int, index: int) -> tuple[float, int]:
    rng = replicate_stream(seed, index)
    g = rng.standard_normal(n)
    p = project(cone, g)
    squared_norm = float(p @ p)
    if abs(squared_norm - float(g @ p)) > 1e-8 * (1.0 + float(g @ g)):
        raise NumericalError(
            f"projection identity ||P g||^2 = g . P g violated at replicate {index}"
        )
    pieces, _ = piece_count(cone, p)
    return squared_norm, _face_dimension(cone, pieces, n)


def _geometry_chunk(start: int, stop: int, cone: ConeKind, n: int, seed: int):
    size = stop - start
    squared_norms = np.empty(size)
    dimensions = np.empty(size, dtype=int)
    for offset, index in enumerate(range(start, stop)):
        squared_norms[offset], dimensions[offset] = _geometry_replicate(cone, n, seed, index)
    return squared_norms, dimensions


def gaussian_projection_samples(
    cone: ConeKind, n: int, replicates: int, seed: int, workers: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Per-replicate (squared norm, face dimension) of projected Gaussians.

    Deterministic in (seed, replicate index) and independent of
    ``workers``.  Each replicate also cross-checks the almost-sure
    identity ||P g||^2 = g . P g and raises NumericalError with the
    replicate index if it fails.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if replicates < 1:
        raise ValueError(f"replicates must be positive, got {replicates}")
    fn = functools.partial(_geometry_chunk, cone=cone, n=n, seed=seed)
    return run_index_chunks(fn, replicates, workers)


def statistical_dimension_mc(
    cone: ConeKind, n: int, replicates: int, seed: int, workers: int = 1
) -> DimensionEstimate:
    """Monte Carlo statistical dimension: average ||P g||^2 over Gaussian draws."""
    if replicates < 2:
        raise ValueError(f"need at least 2 replicates for a standard error, got {replicates}")
    squared_norms, _ = gaussian_projection_samples(cone, n, replicates, seed, workers)
    return DimensionEstimate(
        mean=float(np.mean(squared_norms)),
        std_error=float(np.std(squared_norms, ddof=1) / math.sqrt(replicates)),
        replicates=replicates,
        seed=seed,
    )


def sample_face_dimensions(
    cone: ConeKind, n: int, replicates: int, seed: int, workers: int = 1
) -> FaceDimensionSample:
    """Dimensions of the faces hit by projected standard Gaussians."""
    _, dimensions = gaussian_projection_samples(cone, n, replicates, seed, workers)
    return FaceDimensionSample(dimensions=dimensions, n_points=n)


def _tail_rows(values: np.ndarray, thresholds, parameters, bounds) -> list[TailBoundCheck]:
    count = values.size
    rows = []
    for parameter, threshold, bound in zip(parameters, thresholds, bounds):
        frequency = float(np.mean(values > threshold))
        std_error = math.sqrt(frequency * (1.0 - frequency) / count)
        rows.append(
            TailBoundCheck(
                parameter=float(parameter),
                threshold=float(threshold),
                frequency=frequency,
                bound=float(bound),
                std_error=std_error,
                violated=frequency > bound + 3.0 * std_error,
            )
        )
    return rows


def check_face_dimension_concentration(
    sample: FaceDimensionSample, delta: float, x_values
) -> list[TailBoundCheck]:
    """Empirical tail of the face dimension against exp(-x).

    For each x > 0, compares the frequency of
    ``dimension - delta >= 2 sqrt(x delta) + 6 x`` with the bound
    exp(-x), where delta is the cone's statistical dimension.
    """
    if delta <= 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    x_values = [float(x) for x in x_values]
    if any(x <= 0.0 for x in x_values):
        raise ValueError("x values must be positive")
    excess = np.asarray(sample.dimensions, dtype=float) - delta
    thresholds = [2.0 * math.sqrt(x * delta) + 6.0 * x for x in x_values]
    bounds = [math.exp(-x) for x in x_values]
    rows = []
    count = excess.size
    for x, threshold, bound in zip(x_values, thresholds, bounds):
        frequency = float(np.mean(excess >= threshold))
        std_error = math.sqrt(frequency * (1.0 - frequency) / count)
        rows.append(
            TailBoundCheck(
                parameter=x,
                threshold=threshold,
                frequency=frequency,
                bound=bound,
                std_error=std_error,
                violated=frequency > bound + 3.0 * std_error,
            )
        )
    return rows


def check_norm_concentration(
    cone: ConeKind,
    n: int,
    replicates: int,
    seed: int,
    alphas=(0.1, 0.05),
    delta: float | None = None,
    workers: int = 1,
) -> list[TailBoundCheck]:
    """Empirical tail of ||P g||^2 against its high-probability bound.

    For each level alpha, compares the frequency of
    ``||P g||^2 > 2 delta + 10 ln(1/alpha)`` with alpha.  ``delta``
    defaults to the exact harmonic-number dimension for monotone cones
    and to the sample mean otherwise.
    """
    alphas = [float(a) for a in alphas]
    if any(not 0.0 < a < 1.0 for a in alphas):
        raise ValueError("alphas must lie in (0, 1)")
    squared_norms, _ = gaussian_projection_samples(cone, n, replicates, seed, workers)
    if delta is None:
        if cone.is_monotone:
            delta = statistical_dimension_exact_isotonic(n)
        else:
            delta = float(np.mean(squared_norms))
    thresholds = [2.0 * delta + 10.0 * math.log(1.0 / a) for a in alphas]
    return _tail_rows(squared_norms, thresholds, alphas, alphas)


def _knot_signature(u: np.ndarray) -> tuple[int, ...]:
    _, structure = piece_count_convex(u)
    return tuple(stop for _, stop in structure.ranges[:-1])


def divergence_fd(
    y,
    step: float | None = None,
    jitter_seed: int = 0,
    max_attempts: int = 5,
) -> float:
    """Central finite-difference divergence of the convex projection.

    Estimates the trace of the Jacobian, sum_i d(Pi(y))_i / d(y_i), with
    central differences of step ``1e-6 * (1 + max |y|)`` by default.
    The projection is piecewise affine, so whenever no face boundary is
    crossed the estimate is exact; if the face changes across any of the
    perturbed evaluations, the input is nudged by a seeded jitter of
    relative magnitude 1e-3 and the difference is retried, since the
    piece-count identity for the divergence only holds almost surely.
    The last estimate is returned even if no fully consistent attempt
    was found; the caller is responsible for generic inputs.
    """
    y = as_sequence(y)
    n = y.size
    if step is None:
        step = 1e-6 * (1.0 + float(np.max(np.abs(y))))
    step = float(step)
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step}")

    rng = np.random.default_rng(jitter_seed)
    point = y
    total = 0.0
    for _ in range(max_attempts + 1):
        reference = _knot_signature(convex_projection(point))
        total = 0.0
        consistent = True
        for i in range(n):
            shifted = point.copy()
            shifted[i] = point[i] + step
            upper = convex_projection(shifted)
            shifted[i] = point[i] - step
            lower = convex_projection(shifted)
            if consistent and (
                _knot_signature(upper) != reference or _knot_signature(lower) != reference
            ):
                consistent = False
            total += (upper[i] - lower[i]) / (2.0 * step)
        if consistent:
            return total
        point = y + 1e-3 * (1.0 + float(np.max(np.abs(y)))) * rng.standard_normal(n)
    return total
