"""Figure rendering for the report-producing commands.

Each function takes already-computed data and a target path; figures go
to files (Agg backend), never to a window. Colors follow the sweep
convention: blue for first mode 1, green for first mode 2.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_budgets", "render_trajectory", "render_values"]

_MODE_COLORS = ["tab:blue", "tab:green", "tab:orange", "tab:red", "tab:purple"]

_PNG_META = {"metadata": {"Software": "swlqr"}}


def _mode_color(mode):
    return _MODE_COLORS[mode % len(_MODE_COLORS)]


def render_budgets(rows, path):
    """Planner budget per sweep angle, colored by the first mode chosen."""
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    for mode in sorted({r.first_mode for r in rows}):
        pts = [(r.theta, r.budget) for r in rows if r.first_mode == mode]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], ".",
                color=_mode_color(mode), label=f"mode {mode + 1}")
    ax.set_xlabel(r"$\theta$")
    ax.set_ylabel("budget")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150, **_PNG_META)
    plt.close(fig)


def _contiguous_runs(flags):
    start = None
    for k, f in enumerate(flags):
        if f and start is None:
            start = k
        elif not f and start is not None:
            yield start, k
            start = None
    if start is not None:
        yield start, len(flags)


def render_values(rows, path):
    """Per-angle value with its quadratic bounds and the certified band."""
    theta = np.array([r.theta for r in rows])
    value = np.array([r.value for r in rows])
    lower = np.array([r.lower for r in rows])
    upper = np.array([r.upper for r in rows])
    band = np.array([r.gap_bound for r in rows])
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.plot(theta, lower, "--", color="gray", label="terminal lower bound")
    ax.plot(theta, upper, ":", color="black", label="quadratic upper bound")
    seen = set()
    for mode in sorted({r.first_mode for r in rows}):
        flags = [r.first_mode == mode for r in rows]
        # fill arc by arc so the shading never bridges other modes' angles
        for a, b in _contiguous_runs(flags):
            label = f"certified band, mode {mode + 1}" if mode not in seen else None
            seen.add(mode)
            ax.fill_between(theta[a:b], value[a:b],
                            np.minimum(value[a:b] + band[a:b], upper[a:b]),
                            color=_mode_color(mode), alpha=0.35, label=label)
    ax.plot(theta, value, "-", color="black", linewidth=0.8, label="planned value")
    ax.set_xlabel(r"$\theta$")
    ax.set_ylabel("value")
    ax.legend(loc="best", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150, **_PNG_META)
    plt.close(fig)


def render_trajectory(trajectory, path, envelope=None):
    """State norms over time (log scale) with the certified envelope."""
    norms = np.linalg.norm(trajectory.states, axis=1)
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(5.0, 4.6), sharex=True)
    floor = 1e-18
    ax0.semilogy(np.maximum(norms, floor), ".-", label="|x_k|")
    if envelope is not None:
        ax0.semilogy(np.maximum(np.sqrt(np.asarray(envelope)), floor), "--",
                     color="gray", label="certified envelope")
    ax0.set_ylabel("state norm")
    ax0.legend(loc="best", fontsize=8)
    modes = [i for _, i in trajectory.inputs]
    ax1.step(range(len(modes)), [m + 1 for m in modes], where="post")
    ax1.set_yticks(sorted({m + 1 for m in modes}))
    ax1.set_ylabel("mode")
    ax1.set_xlabel("step")
    fig.tight_layout()
    fig.savefig(path, dpi=150, **_PNG_META)
    plt.close(fig)
