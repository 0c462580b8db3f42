"""Benchmark sweep: plan once per state on the upper half unit circle.

This is the study behind the `reproduce` command: for each angle the
planner runs at the certified horizon, and the row records the value,
its quadratic lower/upper bounds, the near-optimality band and the
planner effort. The suffix cache is shared across the sweep, so the
per-state work collapses after the first few states.
"""

import math
from dataclasses import dataclass

import numpy as np

from .certificates import suboptimality_bound
from .planner import best_first_plan
from .riccati import MemoCache, symmetrize

__all__ = ["SweepRow", "half_circle_states", "sweep_half_circle"]


@dataclass
class SweepRow:
    theta: float
    value: float
    lower: float
    upper: float
    gap_bound: float
    first_mode: int       # 0-based; formatted 1-based on output
    budget: int
    riccati_evals: int


def half_circle_states(n):
    """n states (cos t, sin t) with t = j*pi/(n+1), j = 1..n: the open
    upper half circle, endpoints excluded."""
    return [np.array([math.cos(j * math.pi / (n + 1)), math.sin(j * math.pi / (n + 1))])
            for j in range(1, n + 1)]


def sweep_half_circle(system, p_lower, p_upper, d, n_states, alpha, alpha0, cache=None):
    """Plan at horizon d for each half-circle state; returns SweepRow list."""
    if system.n_x != 2:
        raise ValueError("the half-circle sweep is defined for 2-state systems")
    if cache is None:
        cache = MemoCache(p_lower)
    P_up = symmetrize(np.asarray(p_upper, dtype=float))
    rows = []
    for x in half_circle_states(n_states):
        result = best_first_plan(system, x, d, p_lower, cache=cache)
        band, _ = suboptimality_bound(alpha, alpha0, d, P_up, x)
        rows.append(SweepRow(
            theta=float(math.atan2(x[1], x[0])),
            value=result.value,
            lower=float(x @ cache.seed @ x),
            upper=float(x @ P_up @ x),
            gap_bound=band,
            first_mode=result.sequence[0] if result.sequence else -1,
            budget=result.budget,
            riccati_evals=result.explored_nodes,
        ))
    return rows
