"""Deterministic per-replicate random streams and order-insensitive fan-out.

Every Monte Carlo replicate draws from a generator derived solely from
(master seed, replicate index), so results are bitwise independent of
execution order and of how replicates are partitioned across workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

__all__ = ["replicate_stream", "run_index_chunks"]


def replicate_stream(master_seed: int, index: int) -> np.random.Generator:
    """Independent generator for one replicate of a seeded experiment."""
    if master_seed < 0:
        raise ValueError(f"master seed must be nonnegative, got {master_seed}")
    if index < 0:
        raise ValueError(f"replicate index must be nonnegative, got {index}")
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def run_index_chunks(fn, count: int, workers: int = 1):
    """Evaluate ``fn(start, stop)`` over a partition of ``range(count)``.

    ``fn`` must return a tuple of arrays indexed by replicate; the
    chunks are concatenated back in index order, so the result is
    identical for any worker count.  ``fn`` must be picklable when
    ``workers > 1``.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    workers = min(workers, count)
    if workers == 1:
        return fn(0, count)
    bounds = np.linspace(0, count, workers + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
        parts = [future.result() for future in futures]
    return tuple(np.concatenate(cols) for cols in zip(*parts))
