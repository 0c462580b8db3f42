"""Exhaustive ground truth for validating the best-first planner.

Enumerates every mode sequence of a given depth in lexicographic order
and picks the cheapest; exponential in the depth, so guarded by a cap.
Also hosts the random-system sampler used for seeded differential
testing.
"""

import itertools

import numpy as np

from .model import ModeData, SwitchedSystem
from .riccati import MemoCache, finite_horizon_value

__all__ = ["brute_force_plan", "random_system"]


def brute_force_plan(system, x, d, p_lower, cache=None, cap=1_000_000):
    """Minimum of x'P_seq x over all M^d sequences by enumeration.

    Returns (sequence, value) with the lexicographically first minimizer
    on exact ties, matching the planner's tie-break. Suffix sharing via
    the cache keeps the cost near one Riccati evaluation per sequence.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    n_seqs = system.n_modes ** d
    if n_seqs > cap:
        raise ValueError(f"enumeration of {n_seqs} sequences exceeds cap {cap}")
    if cache is None:
        cache = MemoCache(p_lower)
    best_seq = None
    best_val = None
    visited = 0
    for seq in itertools.product(range(system.n_modes), repeat=d):
        val = finite_horizon_value(system, x, seq, None, cache)
        visited += 1
        if best_val is None or val < best_val:
            best_seq, best_val = seq, val
    assert visited == n_seqs
    return best_seq, best_val


def random_system(rng, max_state_dim=3, max_modes=3, max_input_dim=2):
    """Sample a valid switched system for differential tests.

    Dynamics matrices are scaled to spectral radii in [0.5, 1.3] (a mix
    of stable and unstable modes); Q and R are random PD with comfortable
    margins.
    """
    n_x = int(rng.integers(1, max_state_dim + 1))
    n_u = int(rng.integers(1, max_input_dim + 1))
    n_modes = int(rng.integers(1, max_modes + 1))

    def rand_pd(n):
        G = rng.standard_normal((n, n))
        return G @ G.T / n + 0.2 * np.eye(n)

    modes = []
    for _ in range(n_modes):
        A = rng.standard_normal((n_x, n_x))
        rho = max(abs(np.linalg.eigvals(A)))
        if rho > 0:
            A *= rng.uniform(0.5, 1.3) / rho
        B = rng.standard_normal((n_x, n_u))
        modes.append(ModeData(A=A, B=B, Q=rand_pd(n_x), R=rand_pd(n_u)))
    return SwitchedSystem(tuple(modes))
