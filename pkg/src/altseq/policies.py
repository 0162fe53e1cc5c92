"""Selection policies over the flipped-state recursion.

Every policy sees the chain Y with Y[0] = 0, selects observation x in state
y when x >= threshold(y), and then jumps to 1 - x; a skip leaves the state
unchanged. A tie at the threshold selects. Policies are immutable after
construction; per-replicate state lives in PolicyState (scalar path) or in a
batch dict of arrays (vectorized path), so replicates never share state.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from .finite import FiniteSolution
from .geometric import check_rho, xi0_closed

#: Seek threshold and regeneration band of the concatenated policy.
SEEK_LEVEL = 5.0 / 6.0
REGEN_LEVEL = 1.0 / 6.0


class PolicyKind(Enum):
    FIXED_THRESHOLD = "fixed_threshold"
    GEOMETRIC_OPTIMAL = "geometric_optimal"
    FINITE_OPTIMAL = "finite_optimal"
    CONCATENATED = "concatenated"


@dataclass(frozen=True)
class PolicySpec:
    """Declarative policy description; exactly the fields its kind needs."""

    kind: PolicyKind
    xi: Optional[float] = None
    rho: Optional[float] = None
    finite: Optional[FiniteSolution] = None


@dataclass(frozen=True)
class PolicyState:
    """Per-replicate simulation state.

    block_pos is used by the concatenated policy only: 0 while seeking an
    observation at or above 5/6, otherwise the 1-based position inside the
    current block of n-2 stage-driven steps.
    """

    y: float = 0.0
    selections: int = 0
    block_pos: Optional[int] = None


class Policy:
    """Stateful decision procedure; subclasses define the threshold rule."""

    def initial_state(self) -> PolicyState:
        return PolicyState(y=0.0, selections=0)

    def threshold(self, i: int, y: float) -> float:
        raise NotImplementedError

    def step(self, state: PolicyState, i: int, x: float) -> tuple[bool, PolicyState]:
        """Decide on observation i with value x; returns (selected, next state)."""
        if x >= self.threshold(i, state.y):
            return True, replace(state, y=1.0 - x, selections=state.selections + 1)
        return False, state

    # Vectorized path: one dict of state arrays for a batch of replicates,
    # advanced in lockstep. Must produce the same decisions as step().
    def new_batch(self, size: int) -> dict:
        return {"y": np.zeros(size)}

    def step_batch(
        self, batch: dict, i: int, x: np.ndarray, active: Optional[np.ndarray] = None
    ) -> np.ndarray:
        y = batch["y"]
        sel = x >= self._threshold_array(i, y)
        if active is not None:
            sel &= active
        np.copyto(y, 1.0 - x, where=sel)
        return sel

    def _threshold_array(self, i: int, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class FixedThresholdPolicy(Policy):
    """Select x iff x >= max(xi, y); xi = 0 is the greedy rule (accept
    anything feasible) and xi = 1/2 is the maximally timid rule."""

    def __init__(self, xi: float):
        if not 0.0 <= xi <= 0.5:
            raise ValueError(f"fixed threshold must lie in [0, 1/2], got {xi}")
        self.xi = float(xi)

    def threshold(self, i: int, y: float) -> float:
        return max(self.xi, y)

    def _threshold_array(self, i: int, y: np.ndarray) -> np.ndarray:
        return np.maximum(self.xi, y)


class GeometricOptimalPolicy(FixedThresholdPolicy):
    """Optimal stationary rule for a geometric horizon: max(xi0(rho), y)."""

    def __init__(self, rho: float):
        self.rho = check_rho(rho)
        super().__init__(xi0_closed(rho))


class FiniteOptimalPolicy(Policy):
    """Stage-dependent optimal rule induced by a solved threshold table."""

    def __init__(self, solution: FiniteSolution):
        self.solution = solution
        self.n = solution.n

    def _check_stage(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise ValueError(f"step index {i} outside 1..{self.n}")

    def threshold(self, i: int, y: float) -> float:
        self._check_stage(i)
        sol = self.solution
        return float(np.interp(y, sol.ys, sol.threshold_table[i - 1]))

    def _threshold_array(self, i: int, y: np.ndarray) -> np.ndarray:
        self._check_stage(i)
        sol = self.solution
        return np.interp(y, sol.ys, sol.threshold_table[i - 1])


def _interp_rows(table: np.ndarray, rows: np.ndarray, ys: np.ndarray, y: np.ndarray):
    # Linear interpolation of table[rows] at points y, row chosen per entry.
    step = ys[1] - ys[0]
    j = np.minimum((y / step).astype(np.int64), ys.size - 2)
    frac = y / step - j
    return table[rows, j] * (1.0 - frac) + table[rows, j + 1] * frac


class ConcatenatedPolicy(Policy):
    """Regenerating block policy built from a finite solution with n >= 3.

    Seek the first observation at or above 5/6 and select it (state drops
    into [0, 1/6]); run the next n-2 observations with the stage-1..n-2
    threshold curves; then regenerate: immediately if the state is already
    at or below 1/6, otherwise by seeking again. Meant for geometric-horizon
    simulation as a suboptimality witness, not as a practical policy.
    """

    def __init__(self, solution: FiniteSolution):
        if solution.n < 3:
            raise ValueError(
                f"concatenated policy needs horizon >= 3, got {solution.n}"
            )
        self.solution = solution
        self.n = solution.n

    def initial_state(self) -> PolicyState:
        return PolicyState(y=0.0, selections=0, block_pos=0)

    def step(self, state: PolicyState, i: int, x: float) -> tuple[bool, PolicyState]:
        sol = self.solution
        bp = state.block_pos or 0
        if bp == 0:
            if x >= SEEK_LEVEL:
                return True, PolicyState(
                    y=1.0 - x, selections=state.selections + 1, block_pos=1
                )
            return False, state
        thr = float(np.interp(state.y, sol.ys, sol.threshold_table[bp - 1]))
        selected = x >= thr
        y = 1.0 - x if selected else state.y
        bp += 1
        if bp == self.n - 1:  # block of n-2 stage-driven steps is spent
            bp = 1 if y <= REGEN_LEVEL else 0
        return selected, PolicyState(
            y=y,
            selections=state.selections + (1 if selected else 0),
            block_pos=bp,
        )

    def new_batch(self, size: int) -> dict:
        return {"y": np.zeros(size), "block_pos": np.zeros(size, dtype=np.int64)}

    def step_batch(
        self, batch: dict, i: int, x: np.ndarray, active: Optional[np.ndarray] = None
    ) -> np.ndarray:
        sol = self.solution
        y = batch["y"]
        bp = batch["block_pos"]
        seeking = bp == 0
        thr = np.full(x.shape, SEEK_LEVEL)
        in_block = ~seeking
        if in_block.any():
            thr[in_block] = _interp_rows(
                sol.threshold_table, bp[in_block] - 1, sol.ys, y[in_block]
            )
        sel = x >= thr
        if active is not None:
            sel &= active
        np.copyto(y, 1.0 - x, where=sel)
        moving = in_block if active is None else (in_block & active)
        bp[sel & seeking] = 1
        bp[moving] += 1
        spent = moving & (bp == self.n - 1)
        if spent.any():
            regen = spent & (y <= REGEN_LEVEL)
            bp[regen] = 1
            bp[spent & ~regen] = 0
        return sel


def make_policy(spec: PolicySpec) -> Policy:
    """Build the decision procedure a PolicySpec describes.

    Raises ValueError for a malformed spec: a missing required field, or a
    field its kind does not use.
    """
    provided = {
        name
        for name, value in (("xi", spec.xi), ("rho", spec.rho), ("finite", spec.finite))
        if value is not None
    }
    required = {
        PolicyKind.FIXED_THRESHOLD: {"xi"},
        PolicyKind.GEOMETRIC_OPTIMAL: {"rho"},
        PolicyKind.FINITE_OPTIMAL: {"finite"},
        PolicyKind.CONCATENATED: {"finite"},
    }[spec.kind]
    if provided != required:
        raise ValueError(
            f"{spec.kind.value} spec needs exactly {sorted(required)}, "
            f"got {sorted(provided) or 'nothing'}"
        )
    if spec.kind is PolicyKind.FIXED_THRESHOLD:
        return FixedThresholdPolicy(spec.xi)
    if spec.kind is PolicyKind.GEOMETRIC_OPTIMAL:
        return GeometricOptimalPolicy(spec.rho)
    if spec.kind is PolicyKind.FINITE_OPTIMAL:
        return FiniteOptimalPolicy(spec.finite)
    return ConcatenatedPolicy(spec.finite)


def stationary_rate(xi: float) -> float:
    """Long-run selections per observation of the fixed-threshold-xi policy.

    Under the stationary law of its state chain (uniform on [0, 1-xi]) the
    per-step selection probability is (1 - 2*xi^2) / (2*(1 - xi)); it is
    maximized at xi = 1 - 1/sqrt(2), where it equals 2 - sqrt(2).
    """
    if not 0.0 <= xi <= 0.5:
        raise ValueError(f"threshold must lie in [0, 1/2], got {xi}")
    return (1.0 - 2.0 * xi * xi) / (2.0 * (1.0 - xi))
