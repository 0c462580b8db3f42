"""Stability and near-optimality certificates.

Everything here reduces to eigenvalue computations on small dense
matrices: feasibility of the terminal-cost condition, construction of a
quadratic upper bound on the optimal value function from one
stabilizable mode, the contraction constants alpha and alpha0, the
minimum horizon that certifies closed-loop decay, and the worst-case
planner budget.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .model import default_pd_tol
from .riccati import dare_fixed_point, discrete_lyapunov, gain, symmetrize

__all__ = [
    "CertificateReport",
    "DecayConstants",
    "TerminalConditionReport",
    "certificate_report",
    "compute_alpha",
    "compute_alpha0",
    "construct_upper_bound",
    "decay_constants",
    "min_stabilizing_horizon",
    "scalar_feasible_terminal",
    "suboptimality_bound",
    "terminal_condition_block",
    "verify_terminal_condition",
    "worst_case_budget",
]


def terminal_condition_block(system, p_lower, i):
    """(n_x + n_u)-square block whose PSD-ness encodes the terminal-cost
    condition for mode i:

        [ A'PA - P + Q   A'PB       ]
        [ B'PA           R + B'PB   ]  >= 0
    """
    md = system.mode(i)
    P = symmetrize(np.asarray(p_lower, dtype=float))
    blk = np.block([
        [md.A.T @ P @ md.A - P + md.Q, md.A.T @ P @ md.B],
        [md.B.T @ P @ md.A, md.R + md.B.T @ P @ md.B],
    ])
    return symmetrize(blk)


@dataclass
class TerminalConditionReport:
    passed: bool
    block_min_eigs: list
    p_lower_min_eig: float
    tol: float

    def __str__(self):
        verdict = "PASS" if self.passed else "FAIL"
        eigs = ", ".join(f"mode {k + 1}: {v:.6g}" for k, v in enumerate(self.block_min_eigs))
        return (f"terminal condition {verdict} (tol {self.tol:.3g}); "
                f"min eig of terminal matrix {self.p_lower_min_eig:.6g}; "
                f"block min eigs: {eigs}")


def verify_terminal_condition(system, p_lower, tol=None):
    """Check that the terminal matrix makes sequence costs monotone in
    the horizon: PSD terminal matrix and PSD condition block per mode.

    Report-style: never raises, returns per-mode minimum eigenvalues.
    """
    P = symmetrize(np.asarray(p_lower, dtype=float))
    if tol is None:
        tol = default_pd_tol(P, *(m.Q for m in system.modes))
    p_min = float(np.linalg.eigvalsh(P).min())
    mins = [float(np.linalg.eigvalsh(terminal_condition_block(system, P, i)).min())
            for i in range(system.n_modes)]
    passed = p_min >= -tol and all(v >= -tol for v in mins)
    return TerminalConditionReport(passed=passed, block_min_eigs=mins,
                                   p_lower_min_eig=p_min, tol=tol)


def construct_upper_bound(system, mode=None, max_iter=10000, tol=1e-10):
    """Quadratic upper bound on the optimal value function from a single
    stabilizable mode.

    For the chosen mode (or the first whose Riccati iteration converges)
    the infinite-horizon gain K0 closes the loop, and the bound solves

        A_cl' P A_cl - P = -(Q + K0' R K0),  A_cl = A - B K0.

    Sticking to one mode forever is a feasible policy, so its cost
    matrix upper-bounds the optimal value function.
    """
    candidates = [mode] if mode is not None else range(system.n_modes)
    last_err = None
    for i in candidates:
        try:
            P_inf = dare_fixed_point(system, i, max_iter=max_iter, tol=tol)
        except ValueError as exc:
            last_err = exc
            if mode is not None:
                raise
            continue
        md = system.mode(i)
        K0 = gain(system, P_inf, i)
        A_cl = md.A - md.B @ K0
        return discrete_lyapunov(A_cl, md.Q + K0.T @ md.R @ K0)
    raise ValueError("no stabilizable mode found") from last_err


def _whitened_max_eig(system, D):
    """max over modes of the largest eigenvalue of L^-1 D L^-T with
    Q[i] = L L'; the reciprocal is the largest t with t*D <= Q[i] for
    all i."""
    worst = -math.inf
    for md in system.modes:
        try:
            L = np.linalg.cholesky(symmetrize(md.Q))
        except np.linalg.LinAlgError as exc:
            raise ValueError("stage-cost matrix Q is not positive definite") from exc
        M = np.linalg.solve(L, np.linalg.solve(L, D).T).T
        worst = max(worst, float(np.linalg.eigvalsh(symmetrize(M)).max()))
    return worst


def compute_alpha(system, p_upper):
    """Largest alpha with alpha * P_upper <= Q[i] for every mode.

    Computed as the reciprocal of the largest generalized eigenvalue of
    (P_upper, Q[i]) over modes, via Cholesky whitening of Q. Clamped
    strictly below 1 (with a warning) since the decay analysis needs
    alpha in (0, 1).
    """
    P = symmetrize(np.asarray(p_upper, dtype=float))
    if float(np.linalg.eigvalsh(P).min()) <= 0.0:
        raise ValueError("upper-bound matrix must be positive definite")
    lam = _whitened_max_eig(system, P)
    alpha = 1.0 / lam
    if alpha >= 1.0:
        warnings.warn(f"alpha = {alpha:.6g} >= 1; clamping to 1 - 1e-9", stacklevel=2)
        alpha = 1.0 - 1e-9
    return alpha


def compute_alpha0(system, p_upper, p_lower, tol=None):
    """Largest alpha0 with alpha0 * (P_upper - P_lower) <= Q[i] for all i.

    Directions in the null space of D = P_upper - P_lower impose no
    constraint, which the generalized-eigenvalue computation handles
    automatically: as D -> 0 the bound diverges and math.inf is
    returned (the two bounds sandwich the optimal value function
    exactly).
    """
    D = symmetrize(np.asarray(p_upper, dtype=float) - np.asarray(p_lower, dtype=float))
    if tol is None:
        tol = default_pd_tol(D)
    if float(np.linalg.eigvalsh(D).min()) < -tol:
        raise ValueError("P_upper - P_lower has a negative eigenvalue; "
                         "bounds are not ordered")
    lam = _whitened_max_eig(system, D)
    if lam <= tol:
        return math.inf
    return 1.0 / lam


def min_stabilizing_horizon(alpha, alpha0):
    """Smallest integer horizon strictly exceeding
    max{1, log(alpha0 * alpha) / log(1 - alpha) + 1}.

    With alpha0 = inf only the d > 1 branch binds and the result is 2.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if alpha0 <= 0.0:
        raise ValueError(f"alpha0 must be positive, got {alpha0}")
    if math.isinf(alpha0):
        return 2
    bound = max(1.0, math.log(alpha0 * alpha) / math.log(1.0 - alpha) + 1.0)
    nearest = round(bound)
    # strict inequality: bump when the bound sits (numerically) on an integer
    if abs(bound - nearest) <= 1e-12:
        return int(nearest) + 1
    return int(math.floor(bound)) + 1


class DecayConstants:
    """Per-horizon contraction rate lambda_d and overshoot beta."""

    def __init__(self, lambda_d, beta):
        self.lambda_d = lambda_d
        self.beta = beta

    @property
    def is_contraction(self):
        return self.lambda_d < 1.0

    def __iter__(self):
        return iter((self.lambda_d, self.beta))

    def __repr__(self):
        return (f"DecayConstants(lambda_d={self.lambda_d!r}, beta={self.beta!r}, "
                f"is_contraction={self.is_contraction})")


def decay_constants(system, p_upper, alpha, alpha0, d):
    """lambda_d = 1 - alpha + (1-alpha)^(d-1) / alpha0 and
    beta = max eig(P_upper) / min over modes of min eig(Q)."""
    if d < 2:
        raise ValueError("decay constants require horizon d >= 2")
    lam = 1.0 - alpha
    if not math.isinf(alpha0):
        lam += (1.0 - alpha) ** (d - 1) / alpha0
    P = symmetrize(np.asarray(p_upper, dtype=float))
    q_min = min(float(np.linalg.eigvalsh(symmetrize(m.Q)).min()) for m in system.modes)
    beta = float(np.linalg.eigvalsh(P).max()) / q_min
    return DecayConstants(lam, beta)


def suboptimality_bound(alpha, alpha0, d, p_upper, x):
    """Bound on the gap between the infinite-horizon optimum and the
    depth-d value: absolute = (1/alpha0)(1-alpha)^(d-1) x'P_upper x,
    relative = (1/alpha0)(1-alpha)^(d-1). Returns (0, 0) at x = 0 where
    the ratio is undefined."""
    if d <= 1:
        raise ValueError("the near-optimality bound requires d > 1")
    x = np.asarray(x, dtype=float).reshape(-1)
    relative = 0.0 if math.isinf(alpha0) else (1.0 - alpha) ** (d - 1) / alpha0
    if not np.any(x):
        return 0.0, 0.0
    P = symmetrize(np.asarray(p_upper, dtype=float))
    return relative * float(x @ P @ x), relative


def scalar_feasible_terminal(system, candidate, tol=None, iters=60):
    """Largest c in [0, 1] such that c * candidate satisfies the
    terminal-cost condition; returns c * candidate.

    Bisection fallback for when no dedicated terminal matrix is
    available: c = 0 is always feasible because the stage costs are PD.
    """
    C = symmetrize(np.asarray(candidate, dtype=float))
    if verify_terminal_condition(system, C, tol).passed:
        return C
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if verify_terminal_condition(system, mid * C, tol).passed:
            lo = mid
        else:
            hi = mid
    return lo * C


def worst_case_budget(n_modes, d):
    """Upper bound on best-first leaf selections before a depth-d leaf
    pops: (M^(d+1) - 1) / (M - 1) + 1 complete-tree expansions, with the
    M = 1 closed form handled directly. Exact integer arithmetic."""
    if n_modes < 1 or d < 0:
        raise ValueError("need n_modes >= 1 and d >= 0")
    n_modes = int(n_modes)
    d = int(d)
    if n_modes == 1:
        return d + 2
    return (n_modes ** (d + 1) - 1) // (n_modes - 1) + 1


@dataclass
class CertificateReport:
    """Bundle of everything the `bounds` command reports."""

    p_upper: np.ndarray
    p_lower: np.ndarray
    alpha: float
    alpha0: float
    d_min: int
    d: int
    lambda_d: float
    beta: float
    worst_case_budget: int
    terminal: TerminalConditionReport

    def as_dict(self):
        # infinities become null: strict JSON has no Infinity literal
        return {
            "alpha": self.alpha,
            "alpha0": None if math.isinf(self.alpha0) else self.alpha0,
            "d_min": self.d_min,
            "d": self.d,
            "lambda_d": None if math.isinf(self.lambda_d) else self.lambda_d,
            "beta": self.beta,
            "worst_case_budget": self.worst_case_budget,
            "terminal_condition_passed": self.terminal.passed,
            "P_upper": self.p_upper.tolist(),
            "P_lower": self.p_lower.tolist(),
        }


def certificate_report(system, p_lower, p_upper=None, d=None):
    """Assemble the full certificate for a system and terminal matrix.

    ``p_upper`` defaults to :func:`construct_upper_bound`; ``d``
    defaults to the minimum certified horizon.
    """
    if p_upper is None:
        p_upper = construct_upper_bound(system)
    p_upper = symmetrize(np.asarray(p_upper, dtype=float))
    p_lower = symmetrize(np.asarray(p_lower, dtype=float))
    alpha = compute_alpha(system, p_upper)
    alpha0 = compute_alpha0(system, p_upper, p_lower)
    d_min = min_stabilizing_horizon(alpha, alpha0)
    if d is None:
        d = d_min
    dc = decay_constants(system, p_upper, alpha, alpha0, max(d, 2))
    # the decay rate is only defined for d >= 2; below that there is no
    # certified contraction at all (beta does not depend on d)
    lambda_d = dc.lambda_d if d >= 2 else math.inf
    return CertificateReport(
        p_upper=p_upper,
        p_lower=p_lower,
        alpha=alpha,
        alpha0=alpha0,
        d_min=d_min,
        d=d,
        lambda_d=lambda_d,
        beta=dc.beta,
        worst_case_budget=worst_case_budget(system.n_modes, d),
        terminal=verify_terminal_condition(system, p_lower),
    )
