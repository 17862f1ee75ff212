"""Inner loop of the lattice-point counter.

Two interchangeable backends share one table format:

``a`` (rows x n, int64)
    inequality rows ``a . x >= k * c``; rows ``starts[d]:starts[d+1]`` describe
    the projection onto coordinates ``0..d`` and are zero beyond column ``d``.
``c`` (rows, int64)
    right-hand sides for ``k = 1``.

Besides the plain count, :func:`weighted_sums` also returns the coordinate
sums of the points.  The numba backend is a depth-first walk over
coordinate prefixes; the numpy backend expands the whole frontier one coordinate at a time.  Setting
``CHOW_OBSTRUCT_PURE_NUMPY=1`` (or running without numba) selects numpy.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an optional accelerator
    njit = None

ENV_FLAG = "CHOW_OBSTRUCT_PURE_NUMPY"


def numba_available() -> bool:
    return njit is not None


def default_backend() -> str:
    if os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on"):
        return "numpy"
    return "numba" if numba_available() else "numpy"


def _count_python(a, c, starts, k):
    """Reference walk in plain Python; same algorithm as the numba kernel."""
    n = a.shape[1]
    x = np.zeros(n, dtype=np.int64)
    hi = np.zeros(n, dtype=np.int64)
    total = 0
    d = 0
    descend = True
    while d >= 0:
        if descend:
            low = -(2 ** 62)
            high = 2 ** 62
            for r in range(starts[d], starts[d + 1]):
                coef = a[r, d]
                if coef == 0:
                    continue
                rest = k * c[r]
                for i in range(d):
                    rest -= a[r, i] * x[i]
                if coef > 0:
                    b = -((-rest) // coef)
                    if b > low:
                        low = b
                else:
                    b = rest // coef
                    if b < high:
                        high = b
            if low > high:
                d -= 1
                descend = False
                continue
            if d == n - 1:
                total += high - low + 1
                d -= 1
                descend = False
                continue
            hi[d] = high
            x[d] = low
            d += 1
            continue
        # ascend: advance coordinate d
        if x[d] < hi[d]:
            x[d] += 1
            d += 1
            descend = True
        else:
            d -= 1
    return total


def _weighted_python(a, c, starts, k):
    """Like :func:`_count_python` but also sums the coordinates of every point."""
    n = a.shape[1]
    x = np.zeros(n, dtype=np.int64)
    hi = np.zeros(n, dtype=np.int64)
    sums = np.zeros(n, dtype=np.int64)
    total = 0
    d = 0
    descend = True
    while d >= 0:
        if descend:
            low = -(2 ** 62)
            high = 2 ** 62
            for r in range(starts[d], starts[d + 1]):
                coef = a[r, d]
                if coef == 0:
                    continue
                rest = k * c[r]
                for i in range(d):
                    rest -= a[r, i] * x[i]
                if coef > 0:
                    b = -((-rest) // coef)
                    if b > low:
                        low = b
                else:
                    b = rest // coef
                    if b < high:
                        high = b
            if low > high:
                d -= 1
                descend = False
                continue
            if d == n - 1:
                m = high - low + 1
                total += m
                for i in range(n - 1):
                    sums[i] += m * x[i]
                sums[n - 1] += (low + high) * m // 2
                d -= 1
                descend = False
                continue
            hi[d] = high
            x[d] = low
            d += 1
            continue
        if x[d] < hi[d]:
            x[d] += 1
            d += 1
            descend = True
        else:
            d -= 1
    return total, sums


if njit is not None:
    _count_numba = njit(cache=True)(_count_python)
    _weighted_numba = njit(cache=True)(_weighted_python)
else:  # pragma: no cover
    _count_numba = None
    _weighted_numba = None


def _last_level_numpy(a, c, starts, k):
    """Expand every prefix up to the last coordinate; returns prefixes and bounds there."""
    n = a.shape[1]
    prefixes = np.zeros((1, 0), dtype=np.int64)
    for d in range(n):
        rows = slice(int(starts[d]), int(starts[d + 1]))
        coef = a[rows, d]
        rest = k * c[rows][None, :] - prefixes @ a[rows, :d].T
        pos = coef > 0
        neg = coef < 0
        # ceil for lower bounds, floor for upper bounds
        low = (-((-rest[:, pos]) // coef[pos])).max(axis=1)
        high = (rest[:, neg] // coef[neg]).min(axis=1)
        counts = np.maximum(high - low + 1, 0)
        if d == n - 1:
            return prefixes, low, counts
        keep = counts > 0
        prefixes, low, counts = prefixes[keep], low[keep], counts[keep]
        reps = np.repeat(np.arange(len(counts)), counts)
        offsets = np.arange(int(counts.sum()), dtype=np.int64) - np.repeat(
            np.cumsum(counts) - counts, counts
        )
        prefixes = np.column_stack([prefixes[reps], low[reps] + offsets])
    raise AssertionError("unreachable")


def _count_numpy(a, c, starts, k):
    _, _, counts = _last_level_numpy(a, c, starts, k)
    return int(counts.sum())


def _weighted_numpy(a, c, starts, k):
    prefixes, low, counts = _last_level_numpy(a, c, starts, k)
    sums = np.empty(a.shape[1], dtype=np.int64)
    sums[:-1] = counts @ prefixes
    high = low + counts - 1
    sums[-1] = int(((low + high) * counts // 2)[counts > 0].sum())
    return int(counts.sum()), sums


def _prepare(a, c, starts):
    return (
        np.ascontiguousarray(a, dtype=np.int64),
        np.ascontiguousarray(c, dtype=np.int64),
        np.ascontiguousarray(starts, dtype=np.int64),
    )


def count_points(a, c, starts, k: int, backend: str | None = None) -> int:
    backend = backend or default_backend()
    a, c, starts = _prepare(a, c, starts)
    if backend == "numba":
        if _count_numba is None:
            raise RuntimeError("numba backend requested but numba is not installed")
        return int(_count_numba(a, c, starts, np.int64(k)))
    if backend == "numpy":
        return _count_numpy(a, c, starts, k)
    if backend == "python":
        return int(_count_python(a, c, starts, k))
    raise ValueError(f"unknown backend {backend!r}")


def weighted_sums(a, c, starts, k: int, backend: str | None = None) -> tuple[int, list[int]]:
    """Point count and per-coordinate sum over the lattice points."""
    backend = backend or default_backend()
    a, c, starts = _prepare(a, c, starts)
    if backend == "numba":
        if _weighted_numba is None:
            raise RuntimeError("numba backend requested but numba is not installed")
        total, sums = _weighted_numba(a, c, starts, np.int64(k))
    elif backend == "numpy":
        total, sums = _weighted_numpy(a, c, starts, k)
    elif backend == "python":
        total, sums = _weighted_python(a, c, starts, k)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return int(total), [int(x) for x in sums]
