"""Small shared helpers: point coercion, deterministic parallel map."""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np


def as_point(x) -> np.ndarray:
    """Coerce to a finite 1-D float vector."""
    p = np.asarray(x, dtype=float)
    if p.ndim != 1:
        raise ValueError("point must be a 1-D coordinate vector, got shape %r" % (p.shape,))
    if not np.all(np.isfinite(p)):
        raise ValueError("point has non-finite coordinates: %r" % (p,))
    return p


def scale_of(*points) -> float:
    """Reference magnitude for relative tolerances: 1 + largest coordinate."""
    m = 0.0
    for p in points:
        a = np.asarray(p, dtype=float)
        if a.size:
            m = max(m, float(np.max(np.abs(a))))
    return 1.0 + m


def thread_count() -> int:
    """Worker cap from DILATLAB_THREADS (default 1 = sequential)."""
    raw = os.environ.get("DILATLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Map fn over items, threaded when DILATLAB_THREADS > 1.

    Results come back in input order either way, so callers stay
    deterministic.
    """
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def halving_schedule(start: float = 0.5, count: int = 12) -> np.ndarray:
    """Strictly decreasing schedule start, start/2, ..., start/2**(count-1)."""
    if not (0.0 < start <= 1.0):
        raise ValueError("schedule must start in (0, 1], got %r" % start)
    if count < 2:
        raise ValueError("schedule needs at least 2 entries")
    return start * 0.5 ** np.arange(count, dtype=float)


def check_schedule(eps_schedule: Iterable[float]) -> np.ndarray:
    """Validate a scale schedule: strictly decreasing, inside (0, 1]."""
    eps = np.asarray(list(eps_schedule), dtype=float)
    if eps.ndim != 1 or eps.size < 2:
        raise ValueError("schedule must hold at least 2 scales")
    if np.any(eps <= 0.0) or np.any(eps > 1.0):
        raise ValueError("schedule entries must lie in (0, 1]")
    if np.any(np.diff(eps) >= 0.0):
        raise ValueError("schedule must be strictly decreasing")
    return eps
