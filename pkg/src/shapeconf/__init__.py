"""Shape-restricted least-squares fits with adaptive confidence balls.

The package projects data onto the monotone and convex-sequence cones,
builds honest confidence balls around the fits whose squared radii are
driven by the fitted piece counts, exposes the cone-geometry quantities
(statistical dimension, face dimensions, divergence) behind those radii,
and ships a seeded Monte Carlo harness that verifies the coverage,
adaptivity, and concentration claims empirically.
"""

__version__ = "0.1.0"

from .cones import (
    ConeKind,
    NumericalError,
    PiecewiseStructure,
    as_sequence,
    bounded_isotonic_projection,
    convex_projection,
    isotonic_projection,
    piece_count,
    piece_count_convex,
    piece_count_monotone,
    project,
)
from .confidence import (
    KAPPA_TV,
    ConfidenceBall,
    confidence_ball,
    contains,
    estimate_total_variation,
    radius_convex,
    radius_isotonic,
    radius_tv,
)
from .geometry import (
    DimensionEstimate,
    FaceDimensionSample,
    TailBoundCheck,
    check_face_dimension_concentration,
    check_norm_concentration,
    divergence_fd,
    sample_face_dimensions,
    statistical_dimension_exact_isotonic,
    statistical_dimension_mc,
)
from .sim import (
    DeviationRow,
    ExperimentConfig,
    ExperimentReport,
    GeometryReport,
    SignalFamily,
    SignalSpec,
    generate_signal,
    run_adaptivity,
    run_coverage,
    run_geometry,
)
from .streams import replicate_stream

__all__ = [
    "__version__",
    "ConeKind",
    "NumericalError",
    "PiecewiseStructure",
    "as_sequence",
    "isotonic_projection",
    "bounded_isotonic_projection",
    "convex_projection",
    "piece_count",
    "piece_count_monotone",
    "piece_count_convex",
    "project",
    "KAPPA_TV",
    "ConfidenceBall",
    "confidence_ball",
    "contains",
    "estimate_total_variation",
    "radius_isotonic",
    "radius_tv",
    "radius_convex",
    "DimensionEstimate",
    "FaceDimensionSample",
    "TailBoundCheck",
    "statistical_dimension_exact_isotonic",
    "statistical_dimension_mc",
    "sample_face_dimensions",
    "check_face_dimension_concentration",
    "check_norm_concentration",
    "divergence_fd",
    "SignalFamily",
    "SignalSpec",
    "ExperimentConfig",
    "ExperimentReport",
    "GeometryReport",
    "DeviationRow",
    "generate_signal",
    "run_coverage",
    "run_adaptivity",
    "run_geometry",
    "replicate_stream",
]
