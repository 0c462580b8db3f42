"""Riccati machinery shared by the planner, certificates and simulator.

The central object is the per-mode Riccati operator

    ric(P, i) = Q[i] + A[i]'PA[i] - A[i]'PB[i] (R[i] + B[i]'PB[i])^-1 B[i]'PA[i]

which maps PSD matrices to PD matrices. Composing it from the last mode
of a sequence to the first (seeded with a terminal matrix) yields the
cost matrix of that sequence; x'Px is then the optimal finite-horizon
cost of the sequence for initial state x, with the continuous inputs
eliminated in closed form.

Suffix matrices only depend on the sequence tail and the terminal seed,
never on the state, so they are memoized in a :class:`MemoCache` keyed
by the suffix tuple and can be reused across planning states.
"""

import threading

import numpy as np
from scipy.linalg import cho_factor, cho_solve

__all__ = [
    "MemoCache",
    "dare_fixed_point",
    "discrete_lyapunov",
    "finite_horizon_value",
    "gain",
    "riccati_op",
    "sequence_cost_matrix",
    "symmetrize",
]


def symmetrize(P):
    """Explicit (P + P') / 2; keeps deep compositions from drifting."""
    return 0.5 * (P + P.T)


def _inner_solve(md, P, rhs, i):
    # (R + B'PB)^-1 rhs through a Cholesky factorization; failure of the
    # factorization signals an inner matrix that is not PD, which cannot
    # happen for a valid system and PSD P.
    S = symmetrize(md.R + md.B.T @ P @ md.B)
    try:
        c = cho_factor(S, lower=True)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"inner matrix R + B'PB is not positive definite (mode {i})") from exc
    return cho_solve(c, rhs)


def riccati_op(system, P, i):
    """One backward dynamic-programming step on cost matrix P for mode i.

    The result is symmetrized and is positive definite whenever P is PSD
    (Schur-complement argument on the stage-cost block matrix).
    """
    md = system.mode(i)
    P = np.asarray(P, dtype=float)
    BtPA = md.B.T @ P @ md.A
    out = md.Q + md.A.T @ P @ md.A - md.A.T @ P @ md.B @ _inner_solve(md, P, BtPA, i)
    return symmetrize(out)


def gain(system, P_tail, i):
    """Feedback gain K = (R + B'PB)^-1 B'PA for head mode i.

    P_tail is the cost matrix of the remainder of the sequence (the
    matrix the Riccati step is about to consume). Satisfies the
    completion identity
    ric(P_tail, i) = Q + K'RK + (A - BK)' P_tail (A - BK).
    """
    md = system.mode(i)
    P_tail = np.asarray(P_tail, dtype=float)
    return _inner_solve(md, P_tail, md.B.T @ P_tail @ md.A, i)


class MemoCache:
    """Suffix-keyed store of sequence cost matrices for one terminal seed.

    Lookups are lock-free; insertions are serialized. All stored
    matrices equal the Riccati composition of their key applied to the
    seed, so a cache is only valid for the terminal matrix it was
    created with (checked by :func:`sequence_cost_matrix`). ``misses``
    counts actual Riccati evaluations, which is the planner's work
    metric.
    """

    def __init__(self, p_terminal):
        p = symmetrize(np.asarray(p_terminal, dtype=float))
        p.setflags(write=False)
        self.seed = p
        self.misses = 0
        self._store = {(): p}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._store)

    def get(self, suffix):
        return self._store.get(suffix)

    def put(self, suffix, P):
        with self._lock:
            self._store[suffix] = P
            self.misses += 1


def sequence_cost_matrix(system, seq, p_terminal, cache=None):
    """Cost matrix of a mode sequence: fold the Riccati operator from the
    last mode to the first, seeded with ``p_terminal``.

    The empty sequence returns the terminal matrix. With a cache, every
    intermediate suffix matrix is stored keyed by its suffix tuple, so
    repeated work across sequences sharing tails is avoided.
    """
    seq = tuple(seq)
    if cache is None:
        P = symmetrize(np.asarray(p_terminal, dtype=float))
        for i in reversed(seq):
            P = riccati_op(system, P, i)
        return P
    if p_terminal is not None and not np.array_equal(
            cache.seed, symmetrize(np.asarray(p_terminal, dtype=float))):
        raise ValueError("cache was built for a different terminal matrix")
    # Walk down to the longest suffix already cached, then build back up.
    n = len(seq)
    k = 0
    while k < n and cache.get(seq[k:]) is None:
        k += 1
    P = cache.get(seq[k:])
    for j in range(k - 1, -1, -1):
        P = riccati_op(system, P, seq[j])
        cache.put(seq[j:], P)
    return P


def finite_horizon_value(system, x, seq, p_terminal, cache=None):
    """Optimal cost x'P_seq x of following ``seq`` from state x."""
    x = np.asarray(x, dtype=float).reshape(-1)
    P = sequence_cost_matrix(system, seq, p_terminal, cache)
    return float(x @ P @ x)


def dare_fixed_point(system, i, max_iter=10000, tol=1e-10):
    """Fixed point of P <- ric(P, i), i.e. the discrete algebraic Riccati
    solution for mode i alone.

    Iterates from P = Q[i] until successive iterates agree to ``tol`` in
    max-abs norm. Non-convergence signals a mode that is not
    stabilizable (or a too-tight tolerance). The induced closed loop is
    checked to be Schur before returning.
    """
    P = np.array(system.mode(i).Q, dtype=float)
    with np.errstate(over="ignore"):  # divergence is detected, not a fault
        for _ in range(max_iter):
            try:
                P_next = riccati_op(system, P, i)
            except ValueError as exc:  # overflow reached the inner factorization
                raise ValueError(f"Riccati iteration for mode {i} diverged; "
                                 "mode is not stabilizable") from exc
            if not np.all(np.isfinite(P_next)):
                raise ValueError(f"Riccati iteration for mode {i} diverged; "
                                 "mode is not stabilizable")
            if float(np.max(np.abs(P_next - P))) < tol:
                P = P_next
                break
            P = P_next
        else:
            raise ValueError(
                f"Riccati iteration for mode {i} did not converge in {max_iter} steps; "
                "mode may not be stabilizable or the tolerance is too tight")
    md = system.mode(i)
    K = gain(system, P, i)
    rho = float(np.max(np.abs(np.linalg.eigvals(md.A - md.B @ K))))
    if rho >= 1.0:
        raise ValueError(f"converged Riccati gain for mode {i} is not stabilizing (rho={rho:.6g})")
    return P


def discrete_lyapunov(A_cl, W, tol=None):
    """Unique PSD solution P of A_cl' P A_cl - P = -W for Schur A_cl.

    Solved directly on the vectorized equation (the matrices here are
    small and dense); ``tol`` bounds the accepted residual, defaulting
    to 1e-12 * (1 + max |W|).
    """
    A_cl = np.asarray(A_cl, dtype=float)
    W = symmetrize(np.asarray(W, dtype=float))
    rho = float(np.max(np.abs(np.linalg.eigvals(A_cl))))
    if rho >= 1.0:
        raise ValueError(f"closed-loop matrix is not Schur (spectral radius {rho:.6g})")
    n = A_cl.shape[0]
    # column-major vec: vec(A' P A) = kron(A', A') vec(P)
    lhs = np.eye(n * n) - np.kron(A_cl.T, A_cl.T)
    P = symmetrize(np.linalg.solve(lhs, W.flatten(order="F")).reshape((n, n), order="F"))
    if tol is None:
        tol = 1e-12 * (1.0 + float(np.max(np.abs(W))))
    resid = float(np.max(np.abs(A_cl.T @ P @ A_cl - P + W)))
    if resid > max(tol, 1e-8 * (1.0 + float(np.max(np.abs(P))))):
        raise ValueError(f"Lyapunov solve residual {resid:.3g} exceeds tolerance")
    return P
