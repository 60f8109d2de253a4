"""Least-squares projections onto shape cones and their piece counters.

Two cones are supported in canonical orientation, the nondecreasing
sequences (u_i <= u_{i+1}) and the convex sequences
(2 u_i <= u_{i-1} + u_{i+1}), together with their sign-flipped twins.
Every confidence radius in :mod:`shapeconf.confidence` is driven by the
combinatorial structure of these projections: the number of constant
pieces of the monotone fit and the number of affine pieces of the convex
fit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

__all__ = [
    "ConeKind",
    "NumericalError",
    "PiecewiseStructure",
    "as_sequence",
    "isotonic_projection",
    "bounded_isotonic_projection",
    "convex_projection",
    "piece_count_monotone",
    "piece_count_convex",
    "piece_count",
    "project",
]


class NumericalError(RuntimeError):
    """A solver failed to converge or a numerical identity broke down.

    ``iterations`` carries the iteration count when the failure came from
    an iteration cap, and is None otherwise.
    """

    def __init__(self, message: str, iterations: int | None = None):
        super().__init__(message)
        self.iterations = iterations


class ConeKind(enum.Enum):
    """The supported shape-constraint cones."""

    MONOTONE_NONDECREASING = "nondecreasing"
    MONOTONE_NONINCREASING = "nonincreasing"
    CONVEX = "convex"
    CONCAVE = "concave"

    @property
    def is_monotone(self) -> bool:
        return self in (ConeKind.MONOTONE_NONDECREASING, ConeKind.MONOTONE_NONINCREASING)

    @property
    def is_sign_flipped(self) -> bool:
        """True for the cones handled by negate-project-negate."""
        return self in (ConeKind.MONOTONE_NONINCREASING, ConeKind.CONCAVE)


def as_sequence(values) -> np.ndarray:
    """Validate and return a data sequence as a 1-d float array.

    Raises ValueError for empty input, wrong dimensionality, or
    non-finite entries.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d sequence, got shape {arr.shape}")
    if arr.size < 1:
        raise ValueError("sequence must contain at least one value")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sequence contains non-finite values")
    return arr


def _tie_tolerance(u: np.ndarray) -> float:
    # Two fitted values count as equal within 1e-9 * (1 + max |u|); exact
    # arithmetic would pool blocks exactly, but the convex active-set
    # solver leaves rounding residue.
    return 1e-9 * (1.0 + float(np.max(np.abs(u))))


@dataclass(frozen=True)
class PiecewiseStructure:
    """Partition of the index grid into the maximal pieces of a fit.

    ``ranges`` holds half-open ``(start, stop)`` index pairs that are
    contiguous, disjoint, ordered, and cover ``0..n_points``.
    """

    ranges: tuple[tuple[int, int], ...]
    n_points: int

    def __post_init__(self):
        if not self.ranges:
            raise ValueError("structure must contain at least one range")
        expected_start = 0
        for start, stop in self.ranges:
            if start != expected_start or stop <= start:
                raise ValueError(f"ranges must partition 0..{self.n_points} in order")
            expected_start = stop
        if expected_start != self.n_points:
            raise ValueError(f"ranges must cover 0..{self.n_points}")

    @property
    def piece_count(self) -> int:
        return len(self.ranges)


def isotonic_projection(y) -> np.ndarray:
    """Euclidean projection onto the cone of nondecreasing sequences.

    Pool-adjacent-violators in a single left-to-right pass: each new
    value opens a block, and a block is merged into its predecessor while
    the predecessor's mean is >= its own.  Amortized O(n).  Merging on
    ties as well guarantees that distinct output blocks carry strictly
    increasing values.

    Parameters
    ----------
    y : array_like
        Finite observations, length >= 1.

    Returns
    -------
    numpy.ndarray
        The unique nondecreasing minimizer of ||y - u||.
    """
    y = as_sequence(y)
    means: list[float] = []
    counts: list[int] = []
    for v in y.tolist():
        means.append(v)
        counts.append(1)
        while len(means) > 1 and means[-2] >= means[-1]:
            m = means.pop()
            c = counts.pop()
            total = counts[-1] + c
            means[-1] = (counts[-1] * means[-1] + c * m) / total
            counts[-1] = total
    return np.repeat(means, counts)


def bounded_isotonic_projection(y, lower=-np.inf, upper=np.inf) -> np.ndarray:
    """Projection onto the nondecreasing sequences with endpoint bounds.

    The feasible set is {u nondecreasing : lower <= u_1, u_n <= upper}.
    The solution clips the unconstrained isotonic fit: entries at or
    below ``lower`` become ``lower``, entries at or above ``upper``
    become ``upper``, the rest are untouched.  ``lower`` may be -inf and
    ``upper`` may be +inf; ``lower == upper`` yields the constant
    sequence.
    """
    lower = float(lower)
    upper = float(upper)
    if not lower <= upper:
        raise ValueError(f"need lower <= upper, got {lower} > {upper}")
    return np.clip(isotonic_projection(y), lower, upper)


# ---------------------------------------------------------------------------
# Convex projection: dual active-set NNLS on the second-difference rows.
#
# With d_j = e_j - 2 e_{j+1} + e_{j+2} (j = 0..n-3) the cone is
# K = {u : d_j . u >= 0 for all j} and its polar is the nonnegative span
# of the -d_j.  Projecting onto the polar is the nonnegative
# least-squares problem min_{lam >= 0} ||y + D^T lam||, so
# Pi_K(y) = y + D^T lam*.  The Gram matrix D D^T is pentadiagonal, which
# keeps every passive-set solve banded and O(n).
# ---------------------------------------------------------------------------


def _generator_combination(lam: np.ndarray, n: int) -> np.ndarray:
    """D^T lam for the second-difference rows, without materializing D."""
    v = np.zeros(n)
    v[:-2] += lam
    v[1:-1] -= 2.0 * lam
    v[2:] += lam
    return v


def _gram_banded(p_idx: np.ndarray) -> np.ndarray:
    """Lower banded form of the passive principal submatrix of D D^T."""
    k = p_idx.size
    ab = np.zeros((3, k))
    ab[0] = 6.0
    if k > 1:
        gap = np.diff(p_idx)
        ab[1, :-1] = np.where(gap == 1, -4.0, np.where(gap == 2, 1.0, 0.0))
    if k > 2:
        gap2 = p_idx[2:] - p_idx[:-2]
        ab[2, :-2] = np.where(gap2 == 2, 1.0, 0.0)
    return ab


def _solve_passive(p_idx: np.ndarray, rhs: np.ndarray, n: int) -> np.ndarray:
    """Solve (D D^T)_{PP} x = rhs with one step of iterative refinement."""
    factor = cholesky_banded(_gram_banded(p_idx), lower=True)
    x = cho_solve_banded((factor, True), rhs)
    lam = np.zeros(n - 2)
    lam[p_idx] = x
    residual = rhs - np.diff(_generator_combination(lam, n), 2)[p_idx]
    return x + cho_solve_banded((factor, True), residual)


def _face_fit(y: np.ndarray, knots: np.ndarray) -> np.ndarray:
    """Least-squares fit of y by a piecewise-linear function.

    ``knots`` are the interior grid indices where the slope may change;
    the fit spans exactly the face of the convex cone on which those
    second-difference constraints are free.  A hat basis on the knot
    partition keeps the system well conditioned.
    """
    n = y.size
    nodes = np.unique(np.concatenate(([0.0], np.asarray(knots, dtype=float), [n - 1.0])))
    grid = np.arange(n, dtype=float)
    basis = np.empty((n, nodes.size))
    for k in range(nodes.size):
        weights = np.zeros(nodes.size)
        weights[k] = 1.0
        basis[:, k] = np.interp(grid, nodes, weights)
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    return basis @ coef


def convex_projection(y, max_iter: int | None = None, warm_start=None) -> np.ndarray:
    """Euclidean projection onto the cone of convex sequences.

    Solves the polar nonnegative least-squares problem with a dual
    active-set method (Lawson-Hanson) on the banded second-difference
    Gram matrix, then re-fits the result on the identified face so the
    output satisfies the saturated constraints to machine precision.

    Parameters
    ----------
    y : array_like
        Finite observations, length >= 1.
    max_iter : int, optional
        Cap on passive-set solves; defaults to ``10 * len(y)``.
    warm_start : array_like of bool, optional
        Initial guess for the passive (saturated-constraint) set, length
        ``len(y) - 2``.  Defaults to the sign pattern of the fully
        constrained solve.

    Returns
    -------
    numpy.ndarray
        The unique convex minimizer of ||y - u||.

    Raises
    ------
    NumericalError
        If the active-set loop exceeds ``max_iter`` solves; the error
        carries the iteration count.
    """
    y = as_sequence(y)
    n = y.size
    if n <= 2:
        # the cone is the whole space for n <= 2
        return y.copy()
    m = n - 2
    if max_iter is None:
        max_iter = 10 * n

    second_diffs = np.diff(y, 2)
    rhs_full = -second_diffs
    tol_dual = 1e-10 * (1.0 + float(np.max(np.abs(second_diffs))))

    iterations = 0

    def solve(p_idx):
        nonlocal iterations
        iterations += 1
        if iterations > max_iter:
            raise NumericalError(
                f"convex projection active set did not converge within {max_iter} solves",
                iterations=iterations,
            )
        return _solve_passive(p_idx, rhs_full[p_idx], n)

    if warm_start is not None:
        passive = np.array(warm_start, dtype=bool)
        if passive.shape != (m,):
            raise ValueError(f"warm_start must have length {m}")
    else:
        passive = solve(np.arange(m)) > 0.0

    lam = np.zeros(m)
    # restore feasibility of the warm set: the iterate is 0, so any
    # nonpositive coordinate of the equality solve can be dropped outright
    while passive.any():
        p_idx = np.flatnonzero(passive)
        z = solve(p_idx)
        if np.all(z > 0.0):
            lam[p_idx] = z
            break
        passive[p_idx[z <= 0.0]] = False

    while True:
        gradient = second_diffs + np.diff(_generator_combination(lam, n), 2)
        w = np.where(passive, -np.inf, -gradient)
        j = int(np.argmax(w))
        if w[j] <= tol_dual:
            break
        passive[j] = True
        while True:
            p_idx = np.flatnonzero(passive)
            z = solve(p_idx)
            if np.all(z > 0.0):
                lam[:] = 0.0
                lam[p_idx] = z
                break
            current = lam[p_idx]
            mask = z <= 0.0
            ratios = current[mask] / (current[mask] - z[mask])
            step = float(np.min(ratios))
            lam[p_idx] = current + step * (z - current)
            drop = p_idx[mask & (lam[p_idx] <= 0.0)]
            if drop.size == 0:
                drop = p_idx[mask][np.argmin(ratios)][None]
            lam[drop] = 0.0
            passive[drop] = False

    # polish on the identified face; prune knots whose refitted second
    # difference is not strictly positive under the equality tolerance
    knots = np.flatnonzero(~passive) + 1
    while True:
        fit = _face_fit(y, knots)
        if knots.size == 0:
            break
        strict = np.diff(fit, 2)[knots - 1] > _tie_tolerance(fit)
        if strict.all():
            break
        knots = knots[strict]
    return fit


def piece_count_monotone(u) -> tuple[int, PiecewiseStructure]:
    """Number of constant pieces of a nondecreasing sequence.

    Pieces are the maximal runs of equal values, with equality judged at
    the relative tolerance; for projection outputs the runs coincide
    with the distinct values.  Raises ValueError when the input
    decreases beyond the tolerance.
    """
    u = as_sequence(u)
    tol = _tie_tolerance(u)
    diffs = np.diff(u)
    if diffs.size and float(np.min(diffs)) < -tol:
        raise ValueError("sequence is not nondecreasing within tolerance")
    jumps = np.flatnonzero(diffs > tol)
    starts = np.concatenate(([0], jumps + 1))
    stops = np.concatenate((jumps + 1, [u.size]))
    structure = PiecewiseStructure(
        ranges=tuple((int(a), int(b)) for a, b in zip(starts, stops)),
        n_points=int(u.size),
    )
    return structure.piece_count, structure


def piece_count_convex(u) -> tuple[int, PiecewiseStructure]:
    """Number of affine pieces of a convex sequence.

    One more than the number of interior indices whose second difference
    is strictly positive under the relative tolerance.  For n <= 2 the
    cone is the whole space and the count is 1 by convention.  Raises
    ValueError when a second difference is negative beyond the
    tolerance.
    """
    u = as_sequence(u)
    n = u.size
    if n <= 2:
        return 1, PiecewiseStructure(ranges=((0, n),), n_points=n)
    tol = _tie_tolerance(u)
    second = np.diff(u, 2)
    if float(np.min(second)) < -tol:
        raise ValueError("sequence is not convex within tolerance")
    knots = np.flatnonzero(second > tol) + 1
    starts = np.concatenate(([0], knots + 1))
    stops = np.concatenate((knots + 1, [n]))
    structure = PiecewiseStructure(
        ranges=tuple((int(a), int(b)) for a, b in zip(starts, stops)),
        n_points=n,
    )
    return structure.piece_count, structure


def project(cone: ConeKind, y) -> np.ndarray:
    """Projection onto any supported cone, via sign flips for the negated ones."""
    y = as_sequence(y)
    z = -y if cone.is_sign_flipped else y
    out = isotonic_projection(z) if cone.is_monotone else convex_projection(z)
    return -out if cone.is_sign_flipped else out


def piece_count(cone: ConeKind, u) -> tuple[int, PiecewiseStructure]:
    """Piece count of a fit in any supported cone, in canonical orientation."""
    u = as_sequence(u)
    z = -u if cone.is_sign_flipped else u
    if cone.is_monotone:
        return piece_count_monotone(z)
    return piece_count_convex(z)
