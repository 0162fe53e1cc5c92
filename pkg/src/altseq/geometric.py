"""Geometric (discounted) horizon: solvers and closed forms.

A sample of geometric size N, P(N=k) = rho^(k-1)(1-rho), is equivalent to an
infinite horizon discounted at rho. The single-variable value function v(y)
solves

    v(y) = rho*y*v(y) + int_y^1 max{rho*v(y), 1 + rho*v(1-x)} dx,

is non-increasing with v(1) = 0, is constant on an initial segment [0, xi0],
and the optimal acceptance rule is the threshold max{xi0, y}. Everything
here is deterministic; solved grids are immutable and safe to share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _bellman

SQRT2 = math.sqrt(2.0)

DEFAULT_GRID = 2001
DEFAULT_TOL = 1e-10

#: rho below which the raw threshold formula goes negative and is clamped to 0.
FLAT_REGIME_RHO = 2.0 - SQRT2


class ConvergenceError(RuntimeError):
    """Fixed-point iteration failed to reach tolerance within its cap."""


def check_rho(rho: float) -> float:
    if not 0.0 < rho < 1.0:
        raise ValueError(f"discount factor must satisfy 0 < rho < 1, got {rho}")
    return float(rho)


@dataclass(frozen=True)
class ValueFunctionGrid:
    """Solved single-variable value function on a uniform grid.

    values is non-increasing with values[-1] = 0 and is flat (within solver
    tolerance) on [0, xi_estimate]. residual is the sup-norm of the final
    fixed-point update; iterations the number of operator applications.
    """

    grid_size: int
    ys: np.ndarray
    values: np.ndarray
    xi_estimate: float
    residual: float
    iterations: int

    def value_at(self, y) -> np.ndarray:
        return np.interp(y, self.ys, self.values)


@dataclass(frozen=True)
class TwoStateSolution:
    """Solved pair of value surfaces in original (last value, parity) coordinates."""

    grid_size: int
    ys: np.ndarray
    v_after_min: np.ndarray
    v_after_max: np.ndarray
    residual: float
    iterations: int


def _iteration_cap(rho: float, tol: float) -> int:
    # Guaranteed by the contraction factor rho, starting from the zero
    # function with sup-norm at most 1/(1-rho).
    v_max = 1.0 / (1.0 - rho)
    return math.ceil(math.log(tol / v_max) / math.log(rho)) + 50


def solve_flipped(
    rho: float, grid_size: int = DEFAULT_GRID, tol: float = DEFAULT_TOL
) -> ValueFunctionGrid:
    """Value-iterate the single-variable equation from the zero function."""
    rho = check_rho(rho)
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    ys = _bellman.uniform_grid(grid_size)
    v = np.zeros(grid_size)
    cap = _iteration_cap(rho, tol)
    for iteration in range(1, cap + 1):
        v_next = _bellman.apply_flipped(v, ys, rho)
        residual = float(np.max(np.abs(v_next - v)))
        v = v_next
        if residual < tol:
            return ValueFunctionGrid(
                grid_size=grid_size,
                ys=ys,
                values=v,
                xi_estimate=_threshold_from_values(v, ys, rho),
                residual=residual,
                iterations=iteration,
            )
    raise ConvergenceError(
        f"flipped solve at rho={rho} did not reach tol={tol} in {cap} iterations"
    )


def solve_two_state(
    rho: float, grid_size: int = DEFAULT_GRID, tol: float = DEFAULT_TOL
) -> TwoStateSolution:
    """Value-iterate the original two-line equation from the zero functions."""
    rho = check_rho(rho)
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    ys = _bellman.uniform_grid(grid_size)
    v0 = np.zeros(grid_size)
    v1 = np.zeros(grid_size)
    cap = _iteration_cap(rho, tol)
    for iteration in range(1, cap + 1):
        n0, n1 = _bellman.apply_two_state(v0, v1, ys, rho)
        residual = float(
            max(np.max(np.abs(n0 - v0)), np.max(np.abs(n1 - v1)))
        )
        v0, v1 = n0, n1
        if residual < tol:
            return TwoStateSolution(
                grid_size=grid_size,
                ys=ys,
                v_after_min=v0,
                v_after_max=v1,
                residual=residual,
                iterations=iteration,
            )
    raise ConvergenceError(
        f"two-state solve at rho={rho} did not reach tol={tol} in {cap} iterations"
    )


def extract_threshold(v: ValueFunctionGrid, rho: float) -> float:
    """Smallest root of Delta(y) = 1 + rho*v(1-y) - rho*v(y) on [0, 1/2].

    Grid scan plus linear interpolation inside the straddling cell. If Delta
    is positive on all of [0, 1/2] the acceptance condition already holds at
    x = y for every state and the threshold is 0.
    """
    return _threshold_from_values(v.values, v.ys, check_rho(rho))


def _threshold_from_values(values: np.ndarray, ys: np.ndarray, rho: float) -> float:
    # 1 - ys[k] is itself a grid point, so no interpolation is needed here.
    delta = 1.0 + rho * values[::-1] - rho * values
    # Delta(1/2) = 1 exactly, so scanning one point past 1/2 guarantees the
    # straddling cell is present even when 1/2 is not a grid point.
    half = min(int(np.searchsorted(ys, 0.5, side="right")) + 1, ys.size)
    d = delta[:half]
    if d[0] >= 0.0:
        return 0.0
    nonneg = np.nonzero(d >= 0.0)[0]
    if nonneg.size == 0:
        return 0.0
    k = int(nonneg[0])
    y0, y1 = ys[k - 1], ys[k]
    d0, d1 = d[k - 1], d[k]
    return float(min(y0 + (y1 - y0) * (-d0) / (d1 - d0), 0.5))


def xi0_closed(rho: float) -> float:
    """Optimal threshold 1/sqrt(2) + (1 - sqrt(2))/rho, clamped at 0.

    The raw expression is negative for rho < 2 - sqrt(2); there the
    threshold-free rule is optimal and the threshold is 0.
    """
    rho = check_rho(rho)
    return max(0.0, 1.0 / SQRT2 + (1.0 - SQRT2) / rho)


def value_threshold_form(rho: float) -> float:
    """Candidate optimal value (3 - 2*sqrt(2) - rho + rho*sqrt(2)) / (rho*(1-rho))."""
    rho = check_rho(rho)
    return (3.0 - 2.0 * SQRT2 - rho + rho * SQRT2) / (rho * (1.0 - rho))


def value_flat_form(rho: float) -> float:
    """Candidate optimal value (2 - rho) / (2*(1 - rho)), the zero-threshold policy."""
    rho = check_rho(rho)
    return (2.0 - rho) / (2.0 * (1.0 - rho))


def value_closed(rho: float) -> float:
    """Expected selections under the optimal policy, geometric horizon.

    Uses the threshold-form expression when the optimal threshold is
    positive, and the zero-threshold policy value otherwise; below
    rho = 2 - sqrt(2) the two candidates differ and value iteration backs
    the flat form (see value_threshold_form / value_flat_form for both).
    """
    if xi0_closed(rho) > 0.0:
        return value_threshold_form(rho)
    return value_flat_form(rho)


def fixed_threshold_value(rho: float, xi: float) -> float:
    """Expected selections of the fixed-threshold-xi policy from a fresh start.

    This is the plateau value: the value function of the max{xi, y} rule is
    constant on [0, xi], so the fresh-start value equals its value at xi.
    """
    rho = check_rho(rho)
    return (2.0 - 2.0 * xi - rho + 2.0 * rho * xi - 2.0 * rho * xi * xi) / (
        2.0 * (1.0 - rho) * (1.0 - rho * xi)
    )


def _reflected_value(rho: float, xi: float) -> float:
    # Value of the fixed-threshold policy started at the worst state 1 - xi;
    # the unique solution of the four-condition system jointly with the
    # other three closed forms, cross-checked against a direct numerical
    # fixed point of the policy-value equation.
    num = xi * (
        2.0 - 4.0 * rho * xi - rho**2 + 4.0 * rho**2 * xi - 2.0 * rho**2 * xi**2
    )
    den = 2.0 * (1.0 - rho) * (1.0 - rho * xi) * (1.0 - rho + rho * xi)
    return num / den


def _slope_at_xi(rho: float, xi: float) -> float:
    # Right derivative of the fixed-threshold value at xi.
    num = -2.0 + 4.0 * rho - 4.0 * rho * xi - rho**2 + 2.0 * rho**2 * xi**2
    den = 2.0 * (1.0 - rho * xi) ** 2 * (1.0 - rho + rho * xi)
    return num / den


def _slope_at_reflection(rho: float, xi: float) -> float:
    # Left derivative of the fixed-threshold value at 1 - xi.
    num = -2.0 + 4.0 * rho * xi + rho**2 - 4.0 * rho**2 * xi + 2.0 * rho**2 * xi**2
    den = 2.0 * (1.0 - rho * xi) * (1.0 - rho + rho * xi) ** 2
    return num / den


def value_slope_interior(rho: float, y) -> np.ndarray:
    """Derivative of the fixed-threshold value on (xi, 1-xi).

    The threshold parameter cancels, so a single expression covers every
    fixed-threshold policy on the interior of its non-flat range:
    (2*(1 - rho*y)^2 - (2 - rho)^2) / (2*(1 - rho + rho*y)*(1 - rho*y)^2).
    """
    rho = check_rho(rho)
    y = np.asarray(y, dtype=float)
    num = 2.0 * (1.0 - rho * y) ** 2 - (2.0 - rho) ** 2
    den = 2.0 * (1.0 - rho + rho * y) * (1.0 - rho * y) ** 2
    return num / den


@dataclass(frozen=True)
class ClosedFormDiagnostics:
    """Residuals of the four defining conditions plus the interior slope curve.

    The four conditions tie together V(xi), V(1-xi), V'(xi) and V'(1-xi) of
    the fixed-threshold value function; the closed forms satisfy them
    identically in (rho, xi), so every residual should be at rounding level
    for any xi in [0, 1/2], optimal or not.
    """

    rho: float
    xi: float
    value_at_xi: float
    value_at_reflection: float
    slope_at_xi: float
    slope_at_reflection: float
    residuals: np.ndarray
    slope_curve: Callable[[np.ndarray], np.ndarray]


def closed_form_diagnostics(rho: float, xi: float) -> ClosedFormDiagnostics:
    """Evaluate the four closed forms and the residuals of their conditions."""
    rho = check_rho(rho)
    if not 0.0 <= xi <= 0.5:
        raise ValueError(f"xi must lie in [0, 1/2], got {xi}")
    a = fixed_threshold_value(rho, xi)      # V(xi)
    b = _reflected_value(rho, xi)           # V(1-xi)
    c = _slope_at_xi(rho, xi)               # V'(xi)
    d = _slope_at_reflection(rho, xi)       # V'(1-xi)
    p = 1.0 - rho * xi
    q = 1.0 - rho + rho * xi
    residuals = np.array(
        [
            b * q - (xi + rho * xi * a),
            c * p - (rho * (a - b) - 1.0),
            d * q - (rho * (b - a) - 1.0),
            d * q * q * p - (c * p * p * q + q * q - p * p),
        ]
    )
    return ClosedFormDiagnostics(
        rho=rho,
        xi=xi,
        value_at_xi=a,
        value_at_reflection=b,
        slope_at_xi=c,
        slope_at_reflection=d,
        residuals=residuals,
        slope_curve=lambda y: value_slope_interior(rho, y),
    )
