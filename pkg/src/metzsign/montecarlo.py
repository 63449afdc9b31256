"""Order-independent Monte-Carlo helpers.

Every sample ``k`` draws from its own generator seeded by ``(seed, k)``, so
results do not depend on how the work is split across threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

from .numkit import spectral_abscissa_metzler
from .qualcore import QualMatrix, derived_seed, sample_qual

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "METZLER_SIGN_THREADS"


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        n = int(raw)
    except ValueError:
        n = min(4, os.cpu_count() or 1)
    return max(1, n)


def parallel_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def sample_batch(A: QualMatrix, count: int, seed: int, scale: float = 1.0) -> np.ndarray:
    """``count`` members of Q(A) stacked as ``(count, n, m)``; sample ``k`` uses seed ``(seed, k)``."""
    return np.array([sample_qual(A, derived_seed(seed, k), scale) for k in range(count)])


def max_abscissa(A: QualMatrix, count: int, seed: int, scales: Sequence[float] = (1.0,)) -> float:
    """Largest spectral abscissa over ``count`` draws at each scale."""
    def one(job: tuple[int, float]) -> float:
        k, scale = job
        batch = sample_batch(A, count, seed + k, scale)
        return float(np.max(spectral_abscissa_metzler(batch)))

    jobs = list(enumerate(scales))
    return max(parallel_map(one, jobs))
