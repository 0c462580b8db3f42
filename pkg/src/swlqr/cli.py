"""Command-line interface.

Subcommands: plan | bounds | verify | simulate | reproduce. All take
``--config <path>`` (JSON, see :mod:`swlqr.io`) plus targeted overrides;
``reproduce`` falls back to the bundled two-mode benchmark fixture when
no config is given. Exit codes: 0 success, 1 usage/config error,
2 numerical or verification failure.

Mode indices are printed 1-based everywhere.
"""

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .certificates import (certificate_report, construct_upper_bound,
                           scalar_feasible_terminal, suboptimality_bound,
                           worst_case_budget)
from .experiment import sweep_half_circle
from .io import ConfigError, format_number, load_config, load_system, write_csv
from .model import validate
from .oracle import brute_force_plan, random_system
from .planner import best_first_plan, export_tree_dot
from .riccati import MemoCache
from .simulate import check_decay, realized_cost, simulate_closed_loop

FIXTURE = "two_mode_benchmark.json"


def bundled_fixture_path():
    path = resources.files("swlqr").joinpath("fixtures", FIXTURE)
    if not path.is_file():
        raise ConfigError(f"bundled benchmark fixture {FIXTURE} is missing")
    return str(path)


def fmt_sequence(seq):
    return " ".join(str(i + 1) for i in seq) if seq else "(empty)"


def _load(cfg, require_system=True):
    """Resolve (system, p_lower, p_upper) from a config."""
    if cfg.system is None:
        if not require_system:
            cfg.system = bundled_fixture_path()
        else:
            raise ConfigError("config must name a system file")
    system, p_lower_file, p_upper_file = load_system(cfg.system)
    report = validate(system, cfg.tol)
    if not report.valid:
        raise ConfigError(f"invalid system {cfg.system}:\n{report}")
    p_upper = p_upper_file
    if p_upper is None:
        mode = None if cfg.p_upper_mode is None else cfg.p_upper_mode - 1
        p_upper = construct_upper_bound(system, mode=mode)
    if cfg.terminal == "zero":
        p_lower = np.zeros((system.n_x, system.n_x))
    elif cfg.terminal == "bisection":
        p_lower = scalar_feasible_terminal(system, p_upper, cfg.tol)
    else:
        if p_lower_file is None:
            raise ConfigError("terminal 'explicit' requires P_lower in the system file")
        p_lower = p_lower_file
    return system, p_lower, p_upper


def _outdir(cfg):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _need_state(cfg):
    if not cfg.states:
        raise ConfigError("no initial state given (config 'states' or --x)")
    return cfg.states[0]


def _need_d(cfg):
    if cfg.d is None:
        raise ConfigError("no horizon given (config 'd' or --d)")
    if cfg.d < 0:
        raise ConfigError("horizon must be nonnegative")
    return int(cfg.d)


def cmd_plan(cfg):
    system, p_lower, _ = _load(cfg)
    x = _need_state(cfg)
    d = _need_d(cfg)
    result = best_first_plan(system, x, d, p_lower, trace=cfg.dot)
    print(f"sequence: {fmt_sequence(result.sequence)}")
    print(f"value: {format_number(result.value)}")
    print(f"budget: {result.budget}")
    print(f"riccati evaluations: {result.explored_nodes}")
    if result.first_input is not None:
        u, i = result.first_input
        print(f"first input: u = [{' '.join(format_number(v) for v in u)}], mode = {i + 1}")
    if cfg.dot:
        out = _outdir(cfg)
        dot_path = out / "plan_tree.dot"
        dot_path.write_text(export_tree_dot(result.trace))
        print(f"wrote {dot_path}")
    return 0


def _print_certificates(rep):
    print(f"alpha: {format_number(rep.alpha)}")
    print(f"alpha0: {'inf' if math.isinf(rep.alpha0) else format_number(rep.alpha0)}")
    print(f"d_min: {rep.d_min}")
    print(f"d: {rep.d}")
    contraction = "contraction" if rep.lambda_d < 1.0 else "NO certified decay"
    print(f"lambda_d: {format_number(rep.lambda_d)} ({contraction})")
    print(f"beta: {format_number(rep.beta)}")
    print(f"worst-case budget: {rep.worst_case_budget}")
    print(f"terminal condition: {'PASS' if rep.terminal.passed else 'FAIL'}")


def cmd_bounds(cfg):
    system, p_lower, p_upper = _load(cfg)
    rep = certificate_report(system, p_lower, p_upper, d=cfg.d)
    _print_certificates(rep)
    gaps = []
    for x in cfg.states:
        if rep.d > 1:
            absolute, relative = suboptimality_bound(rep.alpha, rep.alpha0, rep.d,
                                                     rep.p_upper, x)
            print(f"gap bound at x = {x.tolist()}: absolute {format_number(absolute)}, "
                  f"relative {format_number(relative)}")
            gaps.append({"x": x.tolist(), "absolute": absolute, "relative": relative})
        else:
            print(f"gap bound at x = {x.tolist()}: undefined for d <= 1")
    payload = rep.as_dict()
    payload["gaps"] = gaps
    out = _outdir(cfg)
    path = out / "bounds.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")
    return 0


def cmd_verify(cfg):
    system, p_lower, _ = _load(cfg)
    horizons = [int(h) for h in cfg.horizons]
    states = list(cfg.states)
    if not states:
        raise ConfigError("verify needs at least one state (config 'states' or --x)")
    cases = [(system, p_lower, states, horizons)]

    if cfg.random_systems:
        params = dict(cfg.random_systems)
        count = int(params.get("count", 10))
        rng = np.random.default_rng(int(params.get("seed", cfg.seed)))
        max_h = int(params.get("max_horizon", 8))
        for _ in range(count):
            rsys = random_system(rng,
                                 max_state_dim=int(params.get("max_state_dim", 3)),
                                 max_modes=int(params.get("max_modes", 3)))
            rstates = [rng.standard_normal(rsys.n_x) for _ in range(3)]
            rhorizons = [h for h in range(1, max_h + 1)
                         if rsys.n_modes ** h <= cfg.oracle_cap]
            cases.append((rsys, np.zeros((rsys.n_x, rsys.n_x)), rstates, rhorizons))

    max_rel = 0.0
    mismatches = 0
    budget_violations = 0
    checked = 0
    for sys_k, p_lo, sts, hs in cases:
        cache = MemoCache(p_lo)
        for x in sts:
            for d in hs:
                if sys_k.n_modes ** d > cfg.oracle_cap:
                    raise ConfigError(f"horizon {d} exceeds the enumeration cap")
                res = best_first_plan(sys_k, x, d, p_lo, cache=cache)
                seq_o, val_o = brute_force_plan(sys_k, x, d, p_lo, cache=cache,
                                                cap=cfg.oracle_cap)
                val_p = res.value
                if cfg.corrupt_planner:
                    val_p *= 1.0 + 1e-6
                max_rel = max(max_rel, abs(val_p - val_o) / max(abs(val_o), 1e-30))
                if res.sequence != seq_o:
                    mismatches += 1
                if res.budget > worst_case_budget(sys_k.n_modes, d):
                    budget_violations += 1
                checked += 1
    print(f"checked {checked} cases on {len(cases)} systems")
    print(f"max relative value discrepancy: {format_number(max_rel)}")
    print(f"sequence mismatches: {mismatches}")
    print(f"budget-bound violations: {budget_violations}")
    ok = max_rel < 1e-9 and budget_violations == 0
    print("verification PASSED" if ok else "verification FAILED")
    return 0 if ok else 2


def cmd_simulate(cfg):
    system, p_lower, p_upper = _load(cfg)
    x0 = _need_state(cfg)
    d = _need_d(cfg)
    if d < 1:
        raise ConfigError("simulate requires d >= 1")
    traj = simulate_closed_loop(system, x0, d, int(cfg.steps), p_lower)
    out = _outdir(cfg)
    header = (["k"] + [f"x_{j + 1}" for j in range(system.n_x)]
              + [f"u_{j + 1}" for j in range(system.n_u)]
              + ["mode", "stage_cost", "plan_value", "budget"])
    rows = []
    for k in range(traj.steps):
        u, i = traj.inputs[k]
        rows.append([k] + list(traj.states[k]) + list(u)
                    + [i + 1, traj.stage_costs[k], traj.plan_values[k], traj.budgets[k]])
    csv_path = out / "trajectory.csv"
    write_csv(csv_path, header, rows)

    rep = certificate_report(system, p_lower, p_upper, d=d)
    decay = check_decay(traj, rep.lambda_d, rep.beta, rep.p_upper, system)
    print(f"realized cost: {format_number(realized_cost(traj))}")
    print(f"initial plan value: {format_number(traj.plan_values[0])}")
    print(f"final state norm: {format_number(float(np.linalg.norm(traj.states[-1])))}")
    print(str(decay))
    print(f"wrote {csv_path}")
    from .plots import render_trajectory
    fig_path = out / "trajectory.png"
    render_trajectory(traj, fig_path, envelope=None if decay.skipped else decay.envelope)
    print(f"wrote {fig_path}")
    return 0


def cmd_reproduce(cfg):
    system, p_lower, p_upper = _load(cfg, require_system=False)
    rep = certificate_report(system, p_lower, p_upper, d=cfg.d)
    d = rep.d
    _print_certificates(rep)

    cache = MemoCache(p_lower)
    rows = sweep_half_circle(system, p_lower, p_upper, d, int(cfg.n_sweep),
                             rep.alpha, rep.alpha0, cache=cache)
    out = _outdir(cfg)
    csv_path = out / "sweep.csv"
    write_csv(csv_path,
              ["theta", "value", "lower", "upper", "gap_bound", "first_mode", "budget"],
              [[r.theta, r.value, r.lower, r.upper, r.gap_bound, r.first_mode + 1, r.budget]
               for r in rows])

    budgets = [r.budget for r in rows]
    summary = {
        "d": d,
        "n_states": len(rows),
        "budget_mean": float(np.mean(budgets)),
        "budget_max": int(max(budgets)),
        "budget_min": int(min(budgets)),
        "worst_case_budget": rep.worst_case_budget,
        "total_riccati_evals": int(sum(r.riccati_evals for r in rows)),
        "max_riccati_evals_per_state": int(max(r.riccati_evals for r in rows)),
    }
    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")

    written = [csv_path, summary_path]
    if cfg.dot:
        tree_d = min(5, d)
        res = best_first_plan(system, np.array([-1.0, 0.0]), tree_d, p_lower,
                              cache=cache, trace=True)
        dot_path = out / "tree_d5.dot"
        dot_path.write_text(export_tree_dot(res.trace))
        written.append(dot_path)

    from .plots import render_budgets, render_values
    budget_fig = out / "budgets.png"
    values_fig = out / "values.png"
    render_budgets(rows, budget_fig)
    render_values(rows, values_fig)
    written += [budget_fig, values_fig]

    print(f"swept {len(rows)} states at d = {d}: budget mean {summary['budget_mean']:.4g}, "
          f"max {summary['budget_max']}, min {summary['budget_min']}")
    for p in written:
        print(f"wrote {p}")
    return 0


def _parse_state(text):
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse state {text!r}") from exc


def build_parser():
    parser = argparse.ArgumentParser(
        prog="swlqr",
        description="Best-first planning and certificates for switched "
                    "linear-quadratic control.")
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "plan": "plan the optimal mode sequence for one state",
        "bounds": "compute stability/near-optimality certificates",
        "verify": "differential-test the planner against brute force",
        "simulate": "closed-loop receding-horizon simulation",
        "reproduce": "run the bundled benchmark sweep and emit CSV/figures",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None,
                       required=name != "reproduce",
                       help="JSON run configuration")
        p.add_argument("--d", type=int, default=None, help="planning horizon")
        p.add_argument("--x", action="append", default=None, metavar="X1,X2,...",
                       help="initial state (repeatable)")
        p.add_argument("--steps", type=int, default=None, help="closed-loop steps")
        p.add_argument("--out", default=None, help="output directory")
        if name == "reproduce":
            p.add_argument("--n", type=int, default=None, dest="n_sweep",
                           help="number of swept states")
    return parser


_COMMANDS = {
    "plan": cmd_plan,
    "bounds": cmd_bounds,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "reproduce": cmd_reproduce,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {
        "d": args.d,
        "steps": args.steps,
        "out": args.out,
        "n_sweep": getattr(args, "n_sweep", None),
    }
    try:
        if args.x is not None:
            overrides["states"] = [_parse_state(t) for t in args.x]
        cfg = load_config(args.config, overrides)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
