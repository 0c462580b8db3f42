import numpy as np
import pytest
import scipy.linalg

from conftest import make_scalar_system, random_psd
from swlqr.oracle import random_system
from swlqr.riccati import (MemoCache, dare_fixed_point, discrete_lyapunov,
                           finite_horizon_value, gain, riccati_op,
                           sequence_cost_matrix)


def riccati_direct(system, P, i):
    """Independent oracle: the operator written with an explicit inverse."""
    md = system.mode(i)
    inner = np.linalg.inv(md.R + md.B.T @ P @ md.B)
    out = md.Q + md.A.T @ P @ md.A - md.A.T @ P @ md.B @ inner @ md.B.T @ P @ md.A
    return 0.5 * (out + out.T)


def test_riccati_op_at_zero_returns_q(bench_system):
    for i in range(bench_system.n_modes):
        out = riccati_op(bench_system, np.zeros((2, 2)), i)
        assert np.array_equal(out, bench_system.mode(i).Q)


def test_riccati_op_matches_direct_formula(bench_system, bench_p_lower, rng):
    for i in range(bench_system.n_modes):
        expected = riccati_direct(bench_system, bench_p_lower, i)
        got = riccati_op(bench_system, bench_p_lower, i)
        assert np.allclose(got, expected, rtol=1e-12, atol=1e-12)
    for _ in range(20):
        P = random_psd(rng, 2, scale=rng.uniform(0.1, 10.0))
        i = int(rng.integers(0, 2))
        assert np.allclose(riccati_op(bench_system, P, i),
                           riccati_direct(bench_system, P, i), rtol=1e-10, atol=1e-10)


def test_riccati_op_output_dominates_q(bench_system, rng):
    # min eig of ric(P, i) >= min eig of Q_i for PSD P
    for _ in range(25):
        P = random_psd(rng, 2, scale=rng.uniform(0.0, 20.0))
        for i in range(bench_system.n_modes):
            lam = np.linalg.eigvalsh(riccati_op(bench_system, P, i)).min()
            q_min = np.linalg.eigvalsh(bench_system.mode(i).Q).min()
            assert lam >= q_min - 1e-9


def test_riccati_op_output_symmetric_pd(rng):
    for _ in range(10):
        system = random_system(rng)
        P = random_psd(rng, system.n_x)
        for i in range(system.n_modes):
            out = riccati_op(system, P, i)
            assert np.array_equal(out, out.T)
            assert np.linalg.eigvalsh(out).min() > 0.0


def test_riccati_operator_monotone(bench_system, rng):
    # P <= P' implies ric(P) <= ric(P')
    for _ in range(20):
        P = random_psd(rng, 2, scale=2.0)
        P_big = P + random_psd(rng, 2, scale=1.0)
        for i in range(bench_system.n_modes):
            diff = riccati_op(bench_system, P_big, i) - riccati_op(bench_system, P, i)
            assert np.linalg.eigvalsh(diff).min() >= -1e-10


def test_gain_zero_tail(bench_system):
    K = gain(bench_system, np.zeros((2, 2)), 0)
    assert np.array_equal(K, np.zeros((1, 2)))


def test_gain_completion_identity(bench_system, bench_p_lower, rng):
    # ric(P, i) = Q + K'RK + (A - BK)' P (A - BK)
    cases = [(bench_p_lower, 0), (bench_p_lower, 1)]
    cases += [(random_psd(rng, 2, scale=5.0) + 0.1 * np.eye(2), int(rng.integers(0, 2)))
              for _ in range(15)]
    for P, i in cases:
        md = bench_system.mode(i)
        K = gain(bench_system, P, i)
        A_cl = md.A - md.B @ K
        rebuilt = md.Q + K.T @ md.R @ K + A_cl.T @ P @ A_cl
        assert np.allclose(rebuilt, riccati_op(bench_system, P, i), rtol=1e-9, atol=1e-9)


def test_sequence_cost_matrix_empty_and_single(bench_system, bench_p_lower):
    assert np.allclose(sequence_cost_matrix(bench_system, (), bench_p_lower),
                       bench_p_lower, atol=0.0)
    one = sequence_cost_matrix(bench_system, (1,), bench_p_lower)
    assert np.allclose(one, riccati_op(bench_system, bench_p_lower, 1), atol=0.0)


def test_sequence_cost_matrix_is_right_to_left_fold(bench_system, bench_p_lower):
    seq = (0, 1, 1, 0, 1)
    P = np.asarray(bench_p_lower, dtype=float)
    for i in reversed(seq):
        P = riccati_op(bench_system, P, i)
    assert np.array_equal(sequence_cost_matrix(bench_system, seq, bench_p_lower), P)


def test_cache_transparency(bench_system, bench_p_lower, rng):
    # warm-cache results are bit-identical to cold-cache results
    cache = MemoCache(bench_p_lower)
    seqs = [tuple(rng.integers(0, 2, size=rng.integers(0, 9))) for _ in range(30)]
    for seq in seqs:
        cold = sequence_cost_matrix(bench_system, seq, bench_p_lower)
        warm = sequence_cost_matrix(bench_system, seq, bench_p_lower, cache)
        again = sequence_cost_matrix(bench_system, seq, bench_p_lower, cache)
        assert np.array_equal(cold, warm)
        assert np.array_equal(warm, again)


def test_cache_stores_all_suffixes(bench_system, bench_p_lower):
    cache = MemoCache(bench_p_lower)
    seq = (0, 1, 0, 0, 1, 1)
    sequence_cost_matrix(bench_system, seq, bench_p_lower, cache)
    for k in range(len(seq) + 1):
        assert cache.get(seq[k:]) is not None
    assert cache.misses == len(seq)


def test_cache_rejects_foreign_seed(bench_system, bench_p_lower):
    cache = MemoCache(bench_p_lower)
    with pytest.raises(ValueError):
        sequence_cost_matrix(bench_system, (0,), np.zeros((2, 2)), cache)


def test_finite_horizon_value_zero_state(bench_system, bench_p_lower):
    assert finite_horizon_value(bench_system, [0.0, 0.0], (0, 1, 0), bench_p_lower) == 0.0


def test_finite_horizon_value_empty_sequence(bench_system, bench_p_lower):
    val = finite_horizon_value(bench_system, [1.0, 0.0], (), bench_p_lower)
    assert val == float(np.asarray(bench_p_lower)[0, 0])
    # (1,1) entry of the terminal matrix as printed in the benchmark table
    assert val == pytest.approx(5.05, abs=5e-3)


def rollout_value(system, x, seq, p_terminal):
    """Independent oracle: simulate the gain policy forward and add up
    stage costs plus the terminal cost."""
    tails = []
    P = np.asarray(p_terminal, dtype=float)
    tails.append(P)
    for i in reversed(seq):
        P = riccati_op(system, P, i)
        tails.append(P)
    # tails[k] is the matrix for suffix seq[k:] counted from the back
    x_k = np.asarray(x, dtype=float)
    total = 0.0
    for k, i in enumerate(seq):
        P_tail = tails[len(seq) - k - 1]
        K = gain(system, P_tail, i)
        u = -K @ x_k
        md = system.mode(i)
        total += float(x_k @ md.Q @ x_k + u @ md.R @ u)
        x_k = md.A @ x_k + md.B @ u
    total += float(x_k @ np.asarray(p_terminal, dtype=float) @ x_k)
    return total


def test_finite_horizon_value_equals_rollout(bench_system, bench_p_lower, rng):
    for _ in range(20):
        d = int(rng.integers(1, 10))
        seq = tuple(int(v) for v in rng.integers(0, 2, size=d))
        x = rng.standard_normal(2) * rng.uniform(0.1, 3.0)
        via_matrix = finite_horizon_value(bench_system, x, seq, bench_p_lower)
        via_rollout = rollout_value(bench_system, x, seq, bench_p_lower)
        assert via_matrix == pytest.approx(via_rollout, rel=1e-9)


def test_horizon_monotonicity_under_terminal_condition(bench_system, bench_p_lower, rng):
    # appending any mode to any sequence can only increase the cost matrix
    for _ in range(20):
        d = int(rng.integers(0, 8))
        seq = tuple(int(v) for v in rng.integers(0, 2, size=d))
        P_seq = sequence_cost_matrix(bench_system, seq, bench_p_lower)
        for i in range(bench_system.n_modes):
            P_ext = sequence_cost_matrix(bench_system, seq + (i,), bench_p_lower)
            assert np.linalg.eigvalsh(P_ext - P_seq).min() >= -1e-9


def test_dare_fixed_point_scalar_closed_form():
    system = make_scalar_system(0.5, 1.0)
    P = dare_fixed_point(system, 0, tol=1e-14)
    # p = q + a^2 p r / (r + b^2 p) rearranges to p^2 - 0.25 p - 1 = 0
    expected = (0.25 + np.sqrt(0.25 ** 2 + 4.0)) / 2.0
    assert P[0, 0] == pytest.approx(expected, rel=1e-12)
    residual = riccati_op(system, P, 0) - P
    assert abs(residual[0, 0]) < 1e-12


def test_dare_fixed_point_benchmark_mode1(bench_system):
    P = dare_fixed_point(bench_system, 0, tol=1e-13)
    assert np.max(np.abs(riccati_op(bench_system, P, 0) - P)) < 1e-12
    md = bench_system.mode(0)
    K = gain(bench_system, P, 0)
    rho = max(abs(np.linalg.eigvals(md.A - md.B @ K)))
    assert rho < 1.0
    # independent solver agreement
    ref = scipy.linalg.solve_discrete_are(md.A, md.B, md.Q, md.R)
    assert np.allclose(P, ref, rtol=1e-9, atol=1e-9)


def test_dare_fixed_point_diverges_for_unstabilizable():
    system = make_scalar_system(2.0, 0.0)
    with pytest.raises(ValueError, match="not stabilizable|did not converge"):
        dare_fixed_point(system, 0)


def test_discrete_lyapunov_identity_cases():
    W = np.array([[2.0, 0.3], [0.3, 1.0]])
    assert np.allclose(discrete_lyapunov(np.zeros((2, 2)), W), W, atol=1e-14)
    # scalar geometric series: p = w / (1 - a^2)
    P = discrete_lyapunov(np.array([[0.5]]), np.array([[1.0]]))
    assert P[0, 0] == pytest.approx(4.0 / 3.0, rel=1e-13)


def test_discrete_lyapunov_residual_and_scipy(bench_system):
    P_inf = dare_fixed_point(bench_system, 0, tol=1e-13)
    md = bench_system.mode(0)
    K = gain(bench_system, P_inf, 0)
    A_cl = md.A - md.B @ K
    W = md.Q + K.T @ md.R @ K
    P = discrete_lyapunov(A_cl, W)
    assert np.max(np.abs(A_cl.T @ P @ A_cl - P + W)) < 1e-9
    ref = scipy.linalg.solve_discrete_lyapunov(A_cl.T, W)
    assert np.allclose(P, ref, rtol=1e-10, atol=1e-10)
    # the Lyapunov solution of the optimal gain is the fixed point itself
    assert np.allclose(P, P_inf, rtol=1e-9, atol=1e-9)


def test_discrete_lyapunov_rejects_unstable():
    with pytest.raises(ValueError, match="Schur"):
        discrete_lyapunov(np.array([[1.0]]), np.array([[1.0]]))


def test_riccati_op_rejects_broken_inner_matrix(bench_system):
    # indefinite "P" drives R + B'PB negative, which must be reported
    P_bad = np.array([[-100.0, 0.0], [0.0, -100.0]])
    with pytest.raises(ValueError, match="not positive definite"):
        riccati_op(bench_system, P_bad, 0)
