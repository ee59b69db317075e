"""Majorization ordering and the two-coordinate transfer that generates it."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = ["MajorizationVerdict", "majorizes", "epsilon_transfer", "is_permutation"]

TOL = 1e-9


class MajorizationVerdict(NamedTuple):
    majorizes: bool
    equal_up_to_permutation: bool

    def __bool__(self):
        return self.majorizes


def _pair(x, y):
    x = np.array(x, dtype=float).reshape(-1)
    y = np.array(y, dtype=float).reshape(-1)
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} != {y.size}")
    if x.size == 0:
        raise ValueError("vectors must be nonempty")
    return x, y


def is_permutation(x, y, tol: float = TOL) -> bool:
    x, y = _pair(x, y)
    return bool(np.all(np.abs(np.sort(x) - np.sort(y)) <= tol))


def majorizes(x, y, tol: float = TOL) -> MajorizationVerdict:
    """Test whether ``x`` majorizes ``y``.

    Every k-prefix sum of ``x`` sorted in decreasing order must be at least
    the matching prefix sum of ``y``, and the totals must agree.  All
    comparisons use the absolute tolerance ``tol``.
    """
    x, y = _pair(x, y)
    px = np.cumsum(np.sort(x)[::-1])
    py = np.cumsum(np.sort(y)[::-1])
    dominates = bool(np.all(px[:-1] >= py[:-1] - tol)) and abs(px[-1] - py[-1]) <= tol
    same = is_permutation(x, y, tol)
    return MajorizationVerdict(dominates or same, same)


def epsilon_transfer(x, i: int, j: int, eps: float) -> np.ndarray:
    """Move ``eps`` from coordinate ``j`` to the larger coordinate ``i``.

    The result majorizes ``x`` and, for ``eps > 0``, is not a permutation
    of it.
    """
    x = np.array(x, dtype=float).reshape(-1)
    n = x.size
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise ValueError("i and j must be distinct valid indices")
    if x[i] < x[j]:
        raise ValueError("source coordinate j must not exceed target i")
    if eps < 0 or eps > x[j]:
        raise ValueError("eps must lie in [0, x[j]]")
    y = x.copy()
    y[i] += eps
    y[j] -= eps
    return y
