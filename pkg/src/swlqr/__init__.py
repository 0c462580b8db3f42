"""Switched linear-quadratic control: best-first mode-sequence planning,
Riccati cost machinery, stability/near-optimality certificates, a
brute-force oracle and a receding-horizon simulator.
"""

from .certificates import (CertificateReport, DecayConstants, TerminalConditionReport,
                           certificate_report, compute_alpha, compute_alpha0,
                           construct_upper_bound, decay_constants,
                           min_stabilizing_horizon, scalar_feasible_terminal,
                           suboptimality_bound, terminal_condition_block,
                           verify_terminal_condition, worst_case_budget)
from .experiment import half_circle_states, sweep_half_circle
from .io import ConfigError, RunConfig, load_config, load_system, save_system
from .model import (ModeData, ModeSequence, SwitchedSystem, ValidationReport,
                    default_pd_tol, stage_cost, step, validate)
from .oracle import brute_force_plan, random_system
from .planner import PlanResult, SearchTrace, best_first_plan, export_tree_dot, first_input
from .riccati import (MemoCache, dare_fixed_point, discrete_lyapunov,
                      finite_horizon_value, gain, riccati_op,
                      sequence_cost_matrix, symmetrize)
from .simulate import (DecayReport, Trajectory, check_decay, realized_cost,
                       simulate_closed_loop)

__version__ = "0.1.0"

__all__ = [
    "CertificateReport",
    "ConfigError",
    "DecayConstants",
    "DecayReport",
    "MemoCache",
    "ModeData",
    "ModeSequence",
    "PlanResult",
    "RunConfig",
    "SearchTrace",
    "SwitchedSystem",
    "TerminalConditionReport",
    "Trajectory",
    "ValidationReport",
    "best_first_plan",
    "brute_force_plan",
    "certificate_report",
    "check_decay",
    "compute_alpha",
    "compute_alpha0",
    "construct_upper_bound",
    "dare_fixed_point",
    "decay_constants",
    "default_pd_tol",
    "discrete_lyapunov",
    "export_tree_dot",
    "finite_horizon_value",
    "first_input",
    "gain",
    "half_circle_states",
    "load_config",
    "load_system",
    "min_stabilizing_horizon",
    "random_system",
    "realized_cost",
    "riccati_op",
    "save_system",
    "scalar_feasible_terminal",
    "sequence_cost_matrix",
    "simulate_closed_loop",
    "stage_cost",
    "step",
    "suboptimality_bound",
    "sweep_half_circle",
    "symmetrize",
    "terminal_condition_block",
    "validate",
    "verify_terminal_condition",
    "worst_case_budget",
]
