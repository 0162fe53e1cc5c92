"""Offline alternating-subsequence statistics.

An alternating subsequence rises first and then strictly alternates:
x[i1] < x[i2] > x[i3] < x[i4] ... Ties never extend an alternation.
"""

from __future__ import annotations

from typing import Sequence

ORACLE_MAX_LENGTH = 20


def longest_alternating(values: Sequence[float]) -> int:
    """Length of the longest alternating subsequence, by a single linear scan.

    The scan counts maximal monotone runs (plateaus are skipped, so equal
    consecutive values never open or close a run). One element per run
    boundary is optimal, which gives ``runs + 1`` when the sequence starts
    by rising and ``runs`` when it starts by falling, since a falling start
    costs the would-be first ascent.

    Returns 0 for an empty sequence and 1 for any sequence with no strict
    ascent or descent.
    """
    n = len(values)
    if n == 0:
        return 0
    runs = 0
    first_dir = 0
    last_dir = 0
    prev = values[0]
    for v in values[1:]:
        if v > prev:
            d = 1
        elif v < prev:
            d = -1
        else:
            d = 0
        if d != 0 and d != last_dir:
            runs += 1
            if first_dir == 0:
                first_dir = d
            last_dir = d
        prev = v
    if runs == 0:
        return 1
    return runs + (1 if first_dir > 0 else 0)


def longest_alternating_oracle(values: Sequence[float]) -> int:
    """Exhaustive O(n^2) dynamic program over (index, parity) states.

    Independent verification oracle for :func:`longest_alternating`; intended
    for tests only, hence the hard length cap.

    Raises:
        ValueError: if ``len(values) > ORACLE_MAX_LENGTH``.
    """
    n = len(values)
    if n > ORACLE_MAX_LENGTH:
        raise ValueError(
            f"oracle input length {n} exceeds cap {ORACLE_MAX_LENGTH}"
        )
    if n == 0:
        return 0
    # low[j]: best length of a valid subsequence ending at j as a trough
    # (or the starting singleton); high[j]: ending at j as a peak, 0 if none.
    low = [1] * n
    high = [0] * n
    best = 1
    for j in range(n):
        lo, hi = 1, 0
        for k in range(j):
            if values[k] < values[j] and low[k] + 1 > hi:
                hi = low[k] + 1
            if values[k] > values[j] and high[k] > 0 and high[k] + 1 > lo:
                lo = high[k] + 1
        low[j], high[j] = lo, hi
        if lo > best:
            best = lo
        if hi > best:
            best = hi
    return best


def is_alternating(values: Sequence[float]) -> bool:
    """True if the whole sequence strictly alternates starting with an ascent."""
    for idx in range(1, len(values)):
        if idx % 2 == 1:
            if not values[idx] > values[idx - 1]:
                return False
        else:
            if not values[idx] < values[idx - 1]:
                return False
    return True


def permutation_moments(n: int) -> tuple[float, float]:
    """Mean and variance of the statistic over uniform random orderings.

    The closed forms (2n/3 + 1/6, 8n/45 - 13/180) hold for n >= 4; smaller n
    raise to signal the formula's validity range. Ranks of i.i.d. continuous
    draws have the same law, so these also describe ``run_offline`` output.
    """
    if n < 4:
        raise ValueError(f"moment formulas require n >= 4, got {n}")
    return 2.0 * n / 3.0 + 1.0 / 6.0, 8.0 * n / 45.0 - 13.0 / 180.0
