"""Regenerate the bundled two-mode benchmark fixture.

The terminal matrix P_lower maximizes its trace subject to the
monotonicity block LMI, then gets shrunk by 1e-9 so the feasibility
margin is strictly positive under eigenvalue round-off. P_upper is the
single-mode Riccati fixed point of mode 1. Requires cvxpy, which is a
development-only dependency; the shipped package never solves an SDP.

Usage: python tools/make_benchmark_fixture.py > src/swlqr/fixtures/two_mode_benchmark.json
"""

import json
import sys

import cvxpy as cp
import numpy as np

sys.path.insert(0, "src")

from swlqr.model import ModeData, SwitchedSystem  # noqa: E402
from swlqr.riccati import dare_fixed_point  # noqa: E402

A1 = np.array([[2.0, 1.0], [0.0, 1.0]])
A2 = np.array([[2.0, 1.0], [0.0, 0.5]])
B1 = np.array([[1.0], [1.0]])
B2 = np.array([[1.0], [2.0]])
Q = np.eye(2)
R = np.array([[1.0]])

system = SwitchedSystem((ModeData(A1, B1, Q, R), ModeData(A2, B2, Q, R)))

P = cp.Variable((2, 2), symmetric=True)
constraints = [P >> 0]
for md in system.modes:
    block = cp.bmat([
        [md.A.T @ P @ md.A - P + md.Q, md.A.T @ P @ md.B],
        [md.B.T @ P @ md.A, md.R + md.B.T @ P @ md.B],
    ])
    constraints.append(block >> 0)
cp.Problem(cp.Maximize(cp.trace(P)), constraints).solve(solver=cp.SCS, eps=1e-12,
                                                        max_iters=200000)
p_lower = (1.0 - 1e-9) * 0.5 * (P.value + P.value.T)
p_upper = dare_fixed_point(system, 0, tol=1e-15)

data = {
    "modes": [{"A": m.A.tolist(), "B": m.B.tolist(),
               "Q": m.Q.tolist(), "R": m.R.tolist()} for m in system.modes],
    "P_lower": p_lower.tolist(),
    "P_upper": p_upper.tolist(),
}
print(json.dumps(data, indent=2))
