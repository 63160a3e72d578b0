"""Explicit zero-order HAL design over lower-orthant indicators.

This materializes the ``n * sum_l C(d, l)`` indicator columns, so it is only
meant for small problems: it is the brute-force reference the closed-form
kernel is checked against.
"""

from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

from .errors import DataError

DEFAULT_BUDGET = 10**7


def enumerate_subsets(d: int, m: int) -> list[tuple[int, ...]]:
    """Nonempty coordinate subsets of size at most ``m``, by size then lexicographic.

    Coordinates are 0-based: ``enumerate_subsets(2, 2) == [(0,), (1,), (0, 1)]``.
    """
    if d < 1:
        raise DataError(f"enumerate_subsets: d must be >= 1, got {d}")
    if not 1 <= m <= d:
        raise DataError(f"enumerate_subsets: need 1 <= m <= d, got m={m}, d={d}")
    return [s for size in range(1, m + 1) for s in combinations(range(d), size)]


def n_subsets(d: int, m: int) -> int:
    return sum(comb(d, ell) for ell in range(1, m + 1))


def build_design(knots, eval_points, m: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Indicator design with rows = evaluation points and columns = (subset, knot).

    Column ``j * n + i`` holds ``1{eval[a, s_j] >= knots[i, s_j]}`` (all coordinates
    in subset ``s_j``), so columns are subset-major, knot-minor. Duplicate knots
    give duplicate columns.
    """
    knots = np.atleast_2d(np.asarray(knots, dtype=np.float64))
    pts = np.atleast_2d(np.asarray(eval_points, dtype=np.float64))
    if knots.shape[1] != pts.shape[1]:
        raise DataError(
            f"build_design: knots have d={knots.shape[1]}, eval points d={pts.shape[1]}"
        )
    n, d = knots.shape
    subsets = enumerate_subsets(d, m)
    size = pts.shape[0] * n * len(subsets)
    if size > budget:
        raise DataError(
            f"build_design: {size} entries exceed the budget of {budget}; "
            "use the closed-form kernel instead"
        )
    # ge[j][a, i] = eval[a, j] >= knot[i, j]
    ge = pts[:, None, :] >= knots[None, :, :]
    H = np.empty((pts.shape[0], n * len(subsets)), dtype=np.uint8)
    for col, s in enumerate(subsets):
        H[:, col * n:(col + 1) * n] = np.all(ge[:, :, list(s)], axis=2)
    return H
