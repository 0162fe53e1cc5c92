"""Fixed sample size: backward induction and per-stage threshold curves.

The single-variable recursion, solved from the terminal stage down, is

    v[i](y) = y*v[i+1](y) + int_y^1 max{v[i+1](y), 1 + v[i+1](1-x)} dx

with v[n+1] identically 0. The operator does not depend on the stage, so
v[i] for horizon n equals the (n - i + 1)-fold application of the rho=1
Bellman operator to zero; one upward sweep therefore prices every remaining
horizon at once. Unlike the geometric case the value rows are not flat on an
initial segment, so thresholds are stored as full per-stage curves rather
than a single scalar per stage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _bellman

DEFAULT_GRID = 2001


def check_horizon(n: int) -> int:
    if n < 1:
        raise ValueError(f"horizon must be a positive integer, got {n}")
    return int(n)


@dataclass(frozen=True)
class FiniteSolution:
    """Backward-induction output for one horizon.

    value_table has n+1 rows: row i-1 holds stage i (1-based, matching the
    usual v[i,n] indexing), and the final row is the identically-zero
    terminal stage. threshold_table has n rows; row i-1 is the acceptance
    threshold curve for stage i sampled at the grid points. Immutable after
    construction and safe to share across threads.
    """

    n: int
    grid_size: int
    ys: np.ndarray
    value_table: np.ndarray
    threshold_table: np.ndarray

    def value_row(self, i: int) -> np.ndarray:
        """Stage-i value curve, 1 <= i <= n + 1."""
        if not 1 <= i <= self.n + 1:
            raise ValueError(f"stage {i} outside 1..{self.n + 1}")
        return self.value_table[i - 1]

    def threshold_row(self, i: int) -> np.ndarray:
        """Stage-i threshold curve, 1 <= i <= n."""
        if not 1 <= i <= self.n:
            raise ValueError(f"stage {i} outside 1..{self.n}")
        return self.threshold_table[i - 1]

    def value_at(self, i: int, y) -> np.ndarray:
        return np.interp(y, self.ys, self.value_row(i))


def solve_finite(n: int, grid_size: int = DEFAULT_GRID) -> FiniteSolution:
    """Solve the n-stage problem; fills both value and threshold tables."""
    n = check_horizon(n)
    ys = _bellman.uniform_grid(grid_size)
    # remaining[k] = value with k observations left = T^k(0)
    remaining = np.zeros((n + 1, grid_size))
    for k in range(1, n + 1):
        remaining[k] = _bellman.apply_flipped(remaining[k - 1], ys, 1.0)
    value_table = remaining[::-1].copy()  # row i-1 = v[i,n] = T^(n-i+1)(0)
    threshold_table = np.empty((n, grid_size))
    for i in range(1, n + 1):
        threshold_table[i - 1] = _bellman.threshold_curve(remaining[n - i], ys)
    return FiniteSolution(
        n=n,
        grid_size=grid_size,
        ys=ys,
        value_table=value_table,
        threshold_table=threshold_table,
    )


def optimal_expected(n: int, grid_size: int = DEFAULT_GRID) -> float:
    """Expected selections of the optimal policy: the stage-1 value at y = 0."""
    n = check_horizon(n)
    ys = _bellman.uniform_grid(grid_size)
    w = np.zeros(grid_size)
    for _ in range(n):
        w = _bellman.apply_flipped(w, ys, 1.0)
    return float(w[0])


def optimal_expected_curve(n_max: int, grid_size: int = DEFAULT_GRID) -> np.ndarray:
    """optimal_expected(n) for every n in 1..n_max from a single sweep.

    Entry n-1 is bitwise equal to optimal_expected(n, grid_size): both apply
    the identical operator sequence to the zero function.
    """
    n_max = check_horizon(n_max)
    ys = _bellman.uniform_grid(grid_size)
    w = np.zeros(grid_size)
    out = np.empty(n_max)
    for k in range(n_max):
        w = _bellman.apply_flipped(w, ys, 1.0)
        out[k] = w[0]
    return out


def threshold_at(sol: FiniteSolution, i: int, y: float) -> float:
    """Stage-i acceptance threshold at an arbitrary state y.

    inf{x in [y, 1] : v[i+1](y) <= 1 + v[i+1](1-x)}, with the next-stage
    value interpolated at y and the crossing located by grid scan plus
    linear interpolation; 1 if the set is empty (never select).
    """
    if not 1 <= i <= sol.n:
        raise ValueError(f"stage {i} outside 1..{sol.n}")
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"state must lie in [0, 1], got {y}")
    w_next = sol.value_table[i]  # stage i+1 row
    ys = sol.ys
    step = ys[1] - ys[0]
    target = np.interp(y, ys, w_next) - 1.0
    umax = _bellman.last_point_at_least(w_next, ys, step, np.asarray([target]))[0]
    return float(max(y, 1.0 - umax))


def solve_finite_two_state(
    n: int, grid_size: int = DEFAULT_GRID
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Backward induction without the reflection shortcut, for cross-checks.

    Returns (ys, after_min, after_max) where the tables have n+1 stage rows
    in original coordinates. The single-variable solver assumes the
    reflection identity v[i](s, min) = v[i](1-s, max); this solver does not,
    so comparing the two verifies it.
    """
    n = check_horizon(n)
    ys = _bellman.uniform_grid(grid_size)
    after_min = np.zeros((n + 1, grid_size))
    after_max = np.zeros((n + 1, grid_size))
    for i in range(n - 1, -1, -1):  # row index i holds stage i+1
        a, b = _bellman.apply_two_state(after_min[i + 1], after_max[i + 1], ys, 1.0)
        after_min[i] = a
        after_max[i] = b
    return ys, after_min, after_max
