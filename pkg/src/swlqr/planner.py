"""Best-first search over the mode-sequence tree.

The tree of discrete-mode sequences is explored with a binary min-heap
keyed by the point-wise cost J = x' P_seq x. Popping the cheapest leaf
and expanding its children is optimal here because, under the
terminal-cost condition, extending a sequence can only increase its
cost; the first depth-d leaf popped therefore attains the depth-d
optimum, and typically only a thin sliver of the M^d tree is touched.

Heap keys are (J, -len(seq), seq): exact float comparison first (a total
deterministic order, no epsilons), deeper nodes preferred on ties, then
lexicographic. Keys never change after insertion, so no stale-entry
handling is needed.
"""

import heapq
from dataclasses import dataclass, field

import numpy as np

from .riccati import MemoCache, gain, sequence_cost_matrix

__all__ = [
    "PlanResult",
    "SearchTrace",
    "best_first_plan",
    "export_tree_dot",
    "first_input",
]


@dataclass
class SearchTrace:
    """Diagnostics of one planner run, enough to reconstruct the tree."""

    nodes: list = field(default_factory=list)       # (seq, J) in creation order
    popped: list = field(default_factory=list)      # (seq, J) in pop order
    frontier: list = field(default_factory=list)    # (seq, J) left in the heap at stop
    optimal: tuple = ()


@dataclass
class PlanResult:
    sequence: tuple
    value: float
    budget: int
    first_gain: np.ndarray
    first_input: tuple
    explored_nodes: int          # Riccati evaluations performed by this call
    nodes_created: int           # tree nodes allocated, root included
    trace: SearchTrace = None


def best_first_plan(system, x, d, p_lower, cache=None, trace=False):
    """Plan the cheapest depth-d mode sequence from state x.

    Returns a :class:`PlanResult` whose value is the minimum of
    x' P_seq x over all M^d sequences, found without enumerating them.
    ``budget`` counts leaf selections (heap pops); the run is
    deterministic for a given state, horizon and terminal matrix.

    A shared cache makes repeated planning (other states, other
    horizons) drastically cheaper; results are identical with a cold or
    warm cache.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != system.n_x:
        raise ValueError(f"state has dimension {x.shape[0]}, expected {system.n_x}")
    if d < 0:
        raise ValueError("horizon must be nonnegative")
    if cache is None:
        cache = MemoCache(p_lower)
    misses_before = cache.misses

    j_root = float(x @ cache.seed @ x)
    heap = [(j_root, 0, ())]
    tr = SearchTrace() if trace else None
    if tr is not None:
        tr.nodes.append(((), j_root))
    budget = 0
    nodes_created = 1
    while True:
        j_val, _, seq = heapq.heappop(heap)
        budget += 1
        if tr is not None:
            tr.popped.append((seq, j_val))
        if len(seq) == d:
            # stop before expanding: generating this leaf's children
            # would not change the selection, only waste M evaluations
            break
        for i in range(system.n_modes):
            child = seq + (i,)
            P_child = sequence_cost_matrix(system, child, None, cache)
            j_child = float(x @ P_child @ x)
            heapq.heappush(heap, (j_child, -len(child), child))
            nodes_created += 1
            if tr is not None:
                tr.nodes.append((child, j_child))

    if tr is not None:
        tr.frontier = [(s, j) for j, _, s in heap]
        tr.optimal = seq
    if d >= 1:
        p_tail = sequence_cost_matrix(system, seq[1:], None, cache)
        K = gain(system, p_tail, seq[0])
        u0 = (-K @ x, seq[0])
    else:
        K = None
        u0 = None
    return PlanResult(
        sequence=seq,
        value=j_val,
        budget=budget,
        first_gain=K,
        first_input=u0,
        explored_nodes=cache.misses - misses_before,
        nodes_created=nodes_created,
        trace=tr,
    )


def first_input(result, x):
    """Receding-horizon selection from a plan: (-K x, head mode)."""
    if not result.sequence:
        raise ValueError("a depth-0 plan has no input to apply")
    x = np.asarray(x, dtype=float).reshape(-1)
    return -result.first_gain @ x, result.sequence[0]


def _node_label(seq, j_val):
    modes = " ".join(str(i + 1) for i in seq) if seq else "root"
    return f"{modes}\\nJ={j_val:.4g}"


def export_tree_dot(trace, name="search_tree"):
    """Render a traced planner run as a Graphviz digraph.

    One vertex per created node labeled with its (1-based) mode sequence
    and cost; the returned optimal path is drawn bold in magenta.
    """
    if trace is None or not trace.nodes:
        raise ValueError("planner was not run with tracing enabled")
    on_path = {trace.optimal[:k] for k in range(len(trace.optimal) + 1)}
    ids = {seq: f"n{k}" for k, (seq, _) in enumerate(trace.nodes)}
    lines = [f"digraph {name} {{", "  node [shape=box, fontsize=10];"]
    for seq, j_val in trace.nodes:
        attrs = f'label="{_node_label(seq, j_val)}"'
        if seq in on_path:
            attrs += ", color=magenta, penwidth=2.0"
        lines.append(f"  {ids[seq]} [{attrs}];")
    for seq, _ in trace.nodes:
        if not seq:
            continue
        parent = seq[:-1]
        style = " [color=magenta, penwidth=2.0]" if seq in on_path and parent in on_path else ""
        lines.append(f"  {ids[parent]} -> {ids[seq]}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
