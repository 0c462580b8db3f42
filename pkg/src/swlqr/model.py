"""Switched linear system with per-mode quadratic stage costs.

The plant is x+ = A[i] x + B[i] u where the active matrices are selected
by a discrete mode index i. Each mode carries its own stage-cost pair
(Q[i], R[i]), both required to be symmetric positive definite.

Mode indices are 0-based throughout the library; file formats and CLI
output use 1-based indices.
"""

from dataclasses import dataclass, field

import numpy as np

# A mode sequence is a plain tuple of 0-based mode indices; () is the
# empty sequence.
ModeSequence = tuple

__all__ = [
    "ModeData",
    "ModeSequence",
    "SwitchedSystem",
    "ValidationReport",
    "default_pd_tol",
    "stage_cost",
    "step",
    "validate",
]


def _as_matrix(a, name):
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got shape {m.shape}")
    return m


def _readonly(m):
    out = np.array(m, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ModeData:
    """Matrices (A, B, Q, R) of a single mode."""

    A: np.ndarray
    B: np.ndarray
    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        for name in ("A", "B", "Q", "R"):
            object.__setattr__(self, name, _readonly(_as_matrix(getattr(self, name), name)))


@dataclass(frozen=True)
class SwitchedSystem:
    """Immutable family of modes sharing state/input dimensions.

    Dimensions are taken from the first mode; use :func:`validate` to
    check consistency of the remaining modes and definiteness of the
    cost matrices. Construction itself is deliberately permissive so
    that a malformed system can still be loaded and diagnosed.
    """

    modes: tuple
    n_x: int = field(init=False)
    n_u: int = field(init=False)

    def __post_init__(self):
        modes = tuple(self.modes)
        if not modes:
            raise ValueError("a switched system needs at least one mode")
        modes = tuple(m if isinstance(m, ModeData) else ModeData(*m) for m in modes)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "n_x", modes[0].A.shape[0])
        object.__setattr__(self, "n_u", modes[0].B.shape[1])

    @property
    def n_modes(self):
        return len(self.modes)

    def mode(self, i):
        if not 0 <= i < len(self.modes):
            raise IndexError(f"mode index {i} out of range for {len(self.modes)} modes")
        return self.modes[i]


def default_pd_tol(*matrices):
    """Scale-aware positive-definiteness tolerance: 1e-9 * (1 + max |entry|)."""
    peak = max((float(np.max(np.abs(m))) if m.size else 0.0) for m in matrices)
    return 1e-9 * (1.0 + peak)


@dataclass
class ValidationReport:
    """Outcome of :func:`validate`: per-mode diagnostics, overall verdict."""

    valid: bool
    issues: list
    q_min_eigs: list
    r_min_eigs: list
    tol: float

    def __str__(self):
        lines = ["system valid" if self.valid else "system INVALID"]
        for k, (ql, rl) in enumerate(zip(self.q_min_eigs, self.r_min_eigs)):
            lines.append(f"  mode {k + 1}: min eig Q = {ql:.6g}, min eig R = {rl:.6g}")
        lines.extend("  " + msg for msg in self.issues)
        return "\n".join(lines)


def validate(system, tol=None):
    """Check dimensions and positive definiteness of every mode.

    Returns a :class:`ValidationReport` rather than raising, so callers
    can print all diagnostics at once. The system is valid iff all
    matrix shapes are consistent, Q and R are symmetric, and their
    minimum eigenvalues exceed ``tol``.
    """
    n_x, n_u = system.n_x, system.n_u
    issues = []
    q_eigs, r_eigs = [], []
    if tol is None:
        tol = default_pd_tol(*(m for md in system.modes for m in (md.Q, md.R)))
    for k, md in enumerate(system.modes):
        label = f"mode {k + 1}"
        for name, mat, shape in (
            ("A", md.A, (n_x, n_x)),
            ("B", md.B, (n_x, n_u)),
            ("Q", md.Q, (n_x, n_x)),
            ("R", md.R, (n_u, n_u)),
        ):
            if mat.shape != shape:
                issues.append(f"{name} has shape {mat.shape}, expected {shape}, {label}")
        for name, mat, sink in (("Q", md.Q, q_eigs), ("R", md.R, r_eigs)):
            if mat.shape[0] != mat.shape[1]:
                sink.append(float("nan"))
                continue
            sym_err = float(np.max(np.abs(mat - mat.T)))
            if sym_err > 1e-12 * (1.0 + float(np.max(np.abs(mat)))):
                issues.append(f"{name} not symmetric (max asymmetry {sym_err:.3g}), {label}")
            lam = float(np.linalg.eigvalsh(0.5 * (mat + mat.T)).min())
            sink.append(lam)
            if lam <= tol:
                issues.append(f"{name} not positive definite (min eig {lam:.6g}), {label}")
    return ValidationReport(valid=not issues, issues=issues,
                            q_min_eigs=q_eigs, r_min_eigs=r_eigs, tol=tol)


def _check_vectors(system, x, u, i):
    md = system.mode(i)
    x = np.asarray(x, dtype=float).reshape(-1)
    u = np.asarray(u, dtype=float).reshape(-1)
    if x.shape[0] != system.n_x:
        raise ValueError(f"state has dimension {x.shape[0]}, expected {system.n_x}")
    if u.shape[0] != system.n_u:
        raise ValueError(f"input has dimension {u.shape[0]}, expected {system.n_u}")
    return md, x, u


def step(system, x, u, i):
    """One step of the dynamics: A[i] x + B[i] u."""
    md, x, u = _check_vectors(system, x, u, i)
    return md.A @ x + md.B @ u


def stage_cost(system, x, u, i):
    """Quadratic stage cost x'Q[i]x + u'R[i]u; zero only at (x, u) = 0."""
    md, x, u = _check_vectors(system, x, u, i)
    return float(x @ md.Q @ x + u @ md.R @ u)
