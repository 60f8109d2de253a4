"""Seeded Monte Carlo experiments for coverage, adaptivity, and geometry.

Each experiment is fully described by a config value; replicates draw
noise from per-replicate streams so that reports are reproducible and
independent of the worker count.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .cones import ConeKind, piece_count
from .confidence import confidence_ball
from .geometry import (
    DimensionEstimate,
    FaceDimensionSample,
    TailBoundCheck,
    check_face_dimension_concentration,
    gaussian_projection_samples,
    statistical_dimension_exact_isotonic,
)
from .streams import replicate_stream, run_index_chunks

__all__ = [
    "SignalFamily",
    "SignalSpec",
    "ExperimentConfig",
    "DeviationRow",
    "ExperimentReport",
    "GeometryReport",
    "generate_signal",
    "run_coverage",
    "run_adaptivity",
    "run_geometry",
]


class SignalFamily(enum.Enum):
    """Fixed designs for true signals."""

    PIECEWISE_CONSTANT = "piecewise_constant"
    PIECEWISE_AFFINE = "piecewise_affine"
    TV_BOUNDED = "tv_bounded"


@dataclass(frozen=True)
class SignalSpec:
    """Description of one true signal.

    ``complexity`` is the exact number of constant pieces (monotone
    family) or affine pieces (convex family); ``amplitude`` is the jump
    size between block levels, the slope increment between affine
    pieces, or the exact total variation of the ramp.  The fixed designs
    are deterministic; ``seed`` is carried for provenance.
    """

    family: SignalFamily
    n: int
    complexity: int
    amplitude: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.complexity < 1:
            raise ValueError(f"complexity must be positive, got {self.complexity}")
        if not (self.amplitude > 0.0 and math.isfinite(self.amplitude)):
            raise ValueError(f"amplitude must be a positive finite real, got {self.amplitude}")
        if self.family is SignalFamily.PIECEWISE_AFFINE:
            if self.n >= 3 and self.complexity > self.n - 1:
                raise ValueError(
                    f"complexity must not exceed n - 1 for the affine family, "
                    f"got {self.complexity} > {self.n - 1}"
                )
            if self.n < 3 and self.complexity != 1:
                raise ValueError("affine complexity must be 1 for n <= 2")
        elif self.complexity > self.n:
            raise ValueError(f"complexity must not exceed n, got {self.complexity} > {self.n}")


def _run_sizes(total: int, parts: int) -> np.ndarray:
    sizes = np.full(parts, total // parts, dtype=int)
    sizes[: total % parts] += 1
    return sizes


def generate_signal(spec: SignalSpec) -> np.ndarray:
    """Deterministic signal for a spec.

    Piecewise constant: ``complexity`` equal-width-as-possible blocks at
    levels 0, amplitude, 2*amplitude, ...  Piecewise affine: the n - 1
    unit steps are split into ``complexity`` runs whose slopes increase
    by ``amplitude`` per run, centered so the signal is V-shaped.
    TV-bounded: the linear ramp from 0 to ``amplitude``.
    """
    n, k, amplitude = spec.n, spec.complexity, spec.amplitude
    if spec.family is SignalFamily.PIECEWISE_CONSTANT:
        return np.repeat(amplitude * np.arange(k, dtype=float), _run_sizes(n, k))
    if spec.family is SignalFamily.PIECEWISE_AFFINE:
        if n <= 2:
            return np.zeros(n)
        slopes = amplitude * (np.arange(k, dtype=float) - (k - 1) / 2.0)
        steps = np.repeat(slopes, _run_sizes(n - 1, k))
        return np.concatenate(([0.0], np.cumsum(steps)))
    return np.linspace(0.0, amplitude, n)


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one Monte Carlo experiment."""

    signal: SignalSpec
    cone: ConeKind
    sigma: float
    alpha: float
    replicates: int
    master_seed: int
    use_tv_combination: bool = False

    def __post_init__(self):
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be a positive finite real, got {self.sigma}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be positive, got {self.replicates}")
        if self.master_seed < 0:
            raise ValueError(f"master_seed must be nonnegative, got {self.master_seed}")
        if self.use_tv_combination and not self.cone.is_monotone:
            raise ValueError("the total-variation combination requires a monotone cone")


@dataclass(frozen=True)
class DeviationRow:
    """Empirical exceedance of the piece-count deviation bound at one level."""

    gamma: float
    bound: float
    frequency: float
    std_error: float


@dataclass
class ExperimentReport:
    """Per-replicate records plus aggregates for one experiment.

    The ``covered`` flags are exactly ``loss <= squared_radius`` per
    replicate, and ``coverage`` is their mean.
    """

    config: ExperimentConfig
    loss: np.ndarray
    squared_radius: np.ndarray
    pieces: np.ndarray
    covered: np.ndarray
    version: str = __version__
    expected_pieces_bound: float | None = None
    deviation: tuple[DeviationRow, ...] | None = None

    @property
    def replicates(self) -> int:
        return self.loss.size

    @property
    def coverage(self) -> float:
        return float(np.mean(self.covered))

    @property
    def coverage_std_error(self) -> float:
        p = self.coverage
        return math.sqrt(p * (1.0 - p) / self.replicates)

    @property
    def mean_squared_radius(self) -> float:
        return float(np.mean(self.squared_radius))

    @property
    def q90_squared_radius(self) -> float:
        return float(np.quantile(self.squared_radius, 0.9))

    @property
    def mean_pieces(self) -> float:
        return float(np.mean(self.pieces))

    @property
    def mean_radius_ratio(self) -> float:
        """Mean of squared_radius / (sigma^2 * complexity / n).

        Raw adaptivity ratio; the theory only pins it down up to
        logarithmic factors, so it is reported rather than asserted.
        """
        config = self.config
        parametric = config.sigma**2 * config.signal.complexity / config.signal.n
        return float(np.mean(self.squared_radius / parametric))


def _experiment_chunk(start: int, stop: int, config: ExperimentConfig):
    mu = generate_signal(config.signal)
    n = mu.size
    size = stop - start
    loss = np.empty(size)
    squared_radius = np.empty(size)
    pieces = np.empty(size, dtype=int)
    covered = np.empty(size, dtype=bool)
    for offset, index in enumerate(range(start, stop)):
        rng = replicate_stream(config.master_seed, index)
        observed = mu + config.sigma * rng.standard_normal(n)
        ball = confidence_ball(
            observed, config.cone, config.sigma, config.alpha, config.use_tv_combination
        )
        loss[offset] = float(np.mean((ball.center - mu) ** 2))
        squared_radius[offset] = ball.squared_radius
        pieces[offset] = ball.pieces
        covered[offset] = loss[offset] <= squared_radius[offset]
    return loss, squared_radius, pieces, covered


def _run_replicates(config: ExperimentConfig, workers: int) -> ExperimentReport:
    # the signal must actually lie in the cone, otherwise the coverage
    # guarantees under test do not apply
    piece_count(config.cone, generate_signal(config.signal))
    fn = functools.partial(_experiment_chunk, config=config)
    loss, squared_radius, pieces, covered = run_index_chunks(fn, config.replicates, workers)
    return ExperimentReport(
        config=config,
        loss=loss,
        squared_radius=squared_radius,
        pieces=pieces,
        covered=covered,
    )


def run_coverage(config: ExperimentConfig, workers: int = 1) -> ExperimentReport:
    """Coverage experiment: frequency of loss <= squared radius.

    Per replicate, draws Gaussian noise from the replicate's stream,
    builds the confidence ball, and records loss, radius, piece count,
    and the covered flag.
    """
    return _run_replicates(config, workers)


def expected_pieces_bound(config: ExperimentConfig) -> float:
    """Bound on the mean fitted piece count implied by the signal complexity."""
    k = config.signal.complexity
    n = config.signal.n
    if config.cone.is_monotone:
        return k * math.log(math.e * n / k)
    return 10.0 * k * math.log(math.e * n / k) - 1.0


def pieces_deviation_bound(config: ExperimentConfig, gamma: float) -> float:
    """High-probability bound on the fitted piece count at level gamma (monotone)."""
    if not config.cone.is_monotone:
        raise ValueError("the piece-count deviation bound is only available for monotone cones")
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    k = config.signal.complexity
    n = config.signal.n
    return 2.0 * k * math.log(math.e * n / k) + 7.0 * math.log(1.0 / gamma)


def run_adaptivity(
    config: ExperimentConfig, workers: int = 1, gammas=(0.1, 0.05)
) -> ExperimentReport:
    """Adaptivity experiment: fitted piece counts against their bounds.

    Records the same per-replicate fields as :func:`run_coverage` and
    adds the expectation bound on the mean piece count plus, for
    monotone cones, the empirical exceedance of the deviation bound at
    each level in ``gammas``.
    """
    report = _run_replicates(config, workers)
    report.expected_pieces_bound = expected_pieces_bound(config)
    if config.cone.is_monotone:
        rows = []
        for gamma in gammas:
            bound = pieces_deviation_bound(config, gamma)
            frequency = float(np.mean(report.pieces > bound))
            std_error = math.sqrt(frequency * (1.0 - frequency) / report.replicates)
            rows.append(
                DeviationRow(
                    gamma=float(gamma), bound=bound, frequency=frequency, std_error=std_error
                )
            )
        report.deviation = tuple(rows)
    return report


@dataclass
class GeometryReport:
    """Merged geometry diagnostics computed from one shared seed."""

    cone: ConeKind
    n: int
    replicates: int
    seed: int
    dimension: DimensionEstimate
    face_sample: FaceDimensionSample
    squared_norms: np.ndarray
    face_concentration: list[TailBoundCheck]
    norm_concentration: list[TailBoundCheck]
    delta_reference: float
    version: str = __version__

    @property
    def face_dimension_mean(self) -> float:
        return float(np.mean(self.face_sample.dimensions))

    @property
    def face_dimension_std_error(self) -> float:
        return float(
            np.std(self.face_sample.dimensions, ddof=1) / math.sqrt(self.replicates)
        )

    @property
    def min_face_dimension(self) -> int:
        return int(np.min(self.face_sample.dimensions))


def run_geometry(
    cone: ConeKind,
    n: int,
    replicates: int,
    seed: int,
    x_values=(0.5, 1.0, 2.0),
    alphas=(0.1, 0.05),
    workers: int = 1,
) -> GeometryReport:
    """Dimension estimate, face-dimension sample, and concentration tables.

    All three diagnostics share one stream per replicate; the reference
    dimension for the concentration thresholds is the exact harmonic
    number for monotone cones and the Monte Carlo mean otherwise.
    """
    if replicates < 2:
        raise ValueError(f"need at least 2 replicates, got {replicates}")
    squared_norms, dims = gaussian_projection_samples(cone, n, replicates, seed, workers)
    dimension = DimensionEstimate(
        mean=float(np.mean(squared_norms)),
        std_error=float(np.std(squared_norms, ddof=1) / math.sqrt(replicates)),
        replicates=replicates,
        seed=seed,
    )
    face_sample = FaceDimensionSample(dimensions=dims, n_points=n)
    if cone.is_monotone:
        delta = statistical_dimension_exact_isotonic(n)
    else:
        delta = dimension.mean
    face_rows = check_face_dimension_concentration(face_sample, delta, x_values)
    norm_rows = []
    for alpha in alphas:
        alpha = float(alpha)
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alphas must lie in (0, 1), got {alpha}")
        threshold = 2.0 * delta + 10.0 * math.log(1.0 / alpha)
        frequency = float(np.mean(squared_norms > threshold))
        std_error = math.sqrt(frequency * (1.0 - frequency) / replicates)
        norm_rows.append(
            TailBoundCheck(
                parameter=alpha,
                threshold=threshold,
                frequency=frequency,
                bound=alpha,
                std_error=std_error,
                violated=frequency > alpha + 3.0 * std_error,
            )
        )
    return GeometryReport(
        cone=cone,
        n=n,
        replicates=replicates,
        seed=seed,
        dimension=dimension,
        face_sample=face_sample,
        squared_norms=squared_norms,
        face_concentration=face_rows,
        norm_concentration=norm_rows,
        delta_reference=delta,
    )
