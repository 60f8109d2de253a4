"""Data-driven confidence radii and the honest ball around the cone fit.

All radii are squared and live in scaled-norm units, i.e. mean squared
error per coordinate.  The noise level sigma is treated as known
throughout.  Logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cones import ConeKind, as_sequence, piece_count, project

__all__ = [
    "KAPPA_TV",
    "ConfidenceBall",
    "radius_isotonic",
    "radius_tv",
    "radius_convex",
    "estimate_total_variation",
    "confidence_ball",
    "contains",
]

# Multiplicative constant of the total-variation risk bound for the
# monotone least-squares fit; fixed at the known admissible value.
KAPPA_TV = 3.6


def _check_level(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def _check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not (sigma > 0.0 and math.isfinite(sigma)):
        raise ValueError(f"sigma must be a positive finite real, got {sigma}")
    return sigma


def _check_count(value: int, name: str) -> int:
    if value != int(value) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return int(value)


def radius_isotonic(k_hat: int, n: int, sigma: float, alpha: float) -> float:
    """Squared confidence radius driven by the constant-piece count.

    Returns sigma^2 * k_hat * (2 + 22 ln n + 10 ln(1/alpha)) / n.  With
    k_hat the number of constant pieces of the monotone fit, the ball of
    this squared radius around the fit covers the truth with probability
    at least 1 - alpha, uniformly over nondecreasing signals.
    """
    k_hat = _check_count(k_hat, "k_hat")
    n = _check_count(n, "n")
    if k_hat > n:
        raise ValueError(f"k_hat must not exceed n, got {k_hat} > {n}")
    sigma = _check_sigma(sigma)
    alpha = _check_level(alpha)
    return sigma**2 * k_hat * (2.0 + 22.0 * math.log(n) + 10.0 * math.log(1.0 / alpha)) / n


def radius_tv(v_hat: float, n: int, sigma: float, alpha: float, kappa: float = KAPPA_TV) -> float:
    """Squared confidence radius driven by the estimated total variation.

    Returns
    ``2 kappa^2 sigma^2 ((max(v_hat, 0) + 2 sigma sqrt(ln(1/alpha))) / (sigma n))^(2/3)
    + (2 kappa^2 sigma^2 ln(e n) + 4 sigma^2 ln(1/alpha)) / n``.

    A negative total-variation estimate is clamped to zero before the
    2/3 power, which is undefined for negative bases.
    """
    n = _check_count(n, "n")
    sigma = _check_sigma(sigma)
    alpha = _check_level(alpha)
    if not (kappa > 0.0 and math.isfinite(kappa)):
        raise ValueError(f"kappa must be a positive finite real, got {kappa}")
    v = max(float(v_hat), 0.0)
    lead = 2.0 * kappa**2 * sigma**2
    ratio = (v + 2.0 * sigma * math.sqrt(math.log(1.0 / alpha))) / (sigma * n)
    return lead * ratio ** (2.0 / 3.0) + (
        lead * math.log(math.e * n) + 4.0 * sigma**2 * math.log(1.0 / alpha)
    ) / n


def radius_convex(q_hat: int, n: int, sigma: float, alpha: float) -> float:
    """Squared confidence radius driven by the affine-piece count.

    Returns sigma^2 * q_hat * (20 + 40 ln n + 10 ln(1/alpha)) / n; the
    convex-cone analog of :func:`radius_isotonic`.
    """
    q_hat = _check_count(q_hat, "q_hat")
    n = _check_count(n, "n")
    if n >= 3 and q_hat > n - 1:
        raise ValueError(f"q_hat must not exceed n - 1, got {q_hat} > {n - 1}")
    if n <= 2 and q_hat != 1:
        raise ValueError(f"q_hat must be 1 for n <= 2, got {q_hat}")
    sigma = _check_sigma(sigma)
    alpha = _check_level(alpha)
    return sigma**2 * q_hat * (20.0 + 40.0 * math.log(n) + 10.0 * math.log(1.0 / alpha)) / n


def estimate_total_variation(y) -> float:
    """Last observation minus the first."""
    y = as_sequence(y)
    return float(y[-1] - y[0])


@dataclass(frozen=True)
class ConfidenceBall:
    """Closed ball in scaled norm around the cone projection of the data.

    ``alpha`` is the level parameter fed to the radius statistics;
    ``nominal_coverage`` is the guaranteed coverage, which drops to
    1 - 2 alpha when the total-variation combination is used because the
    two statistics are union-bounded.
    """

    center: np.ndarray
    squared_radius: float
    alpha: float
    cone: ConeKind
    pieces: int
    nominal_coverage: float
    v_hat: float | None = None

    def __post_init__(self):
        if self.squared_radius < 0.0:
            raise ValueError("squared_radius must be nonnegative")
        _check_level(self.alpha)


def confidence_ball(
    y,
    cone: ConeKind,
    sigma: float,
    alpha: float,
    use_tv_combination: bool = False,
) -> ConfidenceBall:
    """Honest confidence ball centered at the least-squares cone fit.

    For monotone cones the squared radius is :func:`radius_isotonic`
    evaluated at the fitted piece count, optionally combined with
    :func:`radius_tv` by taking the minimum (nominal coverage then drops
    to 1 - 2 alpha).  For convex cones it is :func:`radius_convex` at
    the fitted affine-piece count.
    """
    y = as_sequence(y)
    sigma = _check_sigma(sigma)
    alpha = _check_level(alpha)
    if use_tv_combination and not cone.is_monotone:
        raise ValueError("the total-variation combination is defined for monotone cones only")

    center = project(cone, y)
    pieces, _ = piece_count(cone, center)
    n = y.size
    v_hat = None
    coverage = 1.0 - alpha
    if cone.is_monotone:
        squared_radius = radius_isotonic(pieces, n, sigma, alpha)
        if use_tv_combination:
            oriented = -y if cone.is_sign_flipped else y
            v_hat = estimate_total_variation(oriented)
            squared_radius = min(squared_radius, radius_tv(v_hat, n, sigma, alpha))
            coverage = 1.0 - 2.0 * alpha
    else:
        squared_radius = radius_convex(pieces, n, sigma, alpha)
    return ConfidenceBall(
        center=center,
        squared_radius=squared_radius,
        alpha=alpha,
        cone=cone,
        pieces=pieces,
        nominal_coverage=coverage,
        v_hat=v_hat,
    )


def contains(ball: ConfidenceBall, mu) -> bool:
    """Closed-ball membership in scaled norm: mean squared deviation <= radius."""
    mu = as_sequence(mu)
    if mu.size != ball.center.size:
        raise ValueError(f"length mismatch: ball has n={ball.center.size}, got {mu.size}")
    return float(np.mean((ball.center - mu) ** 2)) <= ball.squared_radius
