"""Per-node completion-time and energy accounting over a sink tree.

A workload allocation assigns y_i bits to every node.  Each subtask is
shipped from the master along the tree path to its node, store-and-forward
with no pipelining credit, while subtasks of the same subtree share the
channel in schedule order.  A node's cost couples its delivery time, its
compute time, and the energy it spends computing and relaying:

    time_i   = transmission_i + waiting_i + compute_i
    energy_i = compute_energy_i + relay_energy_i
    J_i      = w1 * time_i + w2 * energy_i

The system objective is max_i J_i.  For a fixed schedule every J_i is a
nonnegative linear form in y, which `cost_coefficients` materializes as a
matrix; the solvers work on that form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ScheduleError
from .network import ServerParams
from .tree import SinkTree
from .units import DEFAULT_B


@dataclass(frozen=True)
class Weights:
    """Objective weights: w1 scales seconds, w2 scales joules."""

    w1: float
    w2: float

    def __post_init__(self):
        if self.w1 < 0.0 or self.w2 < 0.0:
            raise ParameterError("weights must be nonnegative")
        if self.w1 == 0.0 and self.w2 == 0.0:
            raise ParameterError("at least one weight must be positive")


@dataclass(frozen=True)
class Allocation:
    """Workload split in bits; index matches tree ids."""

    y: tuple[float, ...]
    total: float

    def __post_init__(self):
        if self.total < 0.0:
            raise ParameterError("total workload must be >= 0")
        for i, v in enumerate(self.y):
            if v < 0.0:
                raise ParameterError(f"y[{i}] must be >= 0, got {v}")
        drift = abs(sum(self.y) - self.total)
        if drift > 1e-6 * self.total + 1e-9:
            raise ParameterError(
                f"allocation sums to {sum(self.y)}, expected {self.total}"
            )

    @classmethod
    def from_values(cls, values, total: float | None = None) -> "Allocation":
        values = tuple(float(v) for v in values)
        return cls(y=values, total=float(sum(values)) if total is None else float(total))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.y, dtype=float)


@dataclass(frozen=True)
class Schedule:
    """Per-subtree transmission orders, earliest first.

    orders[k] is a permutation of the k-th subtree's node set, where
    subtrees are taken in ascending root id (the tree's own ordering).
    """

    orders: tuple[tuple[int, ...], ...]

    @classmethod
    def from_mapping(cls, tree: SinkTree, by_root: dict[int, tuple[int, ...]]) -> "Schedule":
        return cls(orders=tuple(tuple(by_root[t]) for t in tree.subtree_roots))


def canonical_schedule(tree: SinkTree) -> Schedule:
    """Ascending-id order inside every subtree."""
    return Schedule(orders=tuple(tree.subtrees[t] for t in tree.subtree_roots))


def validate_schedule(tree: SinkTree, schedule: Schedule) -> None:
    roots = tree.subtree_roots
    if len(schedule.orders) != len(roots):
        raise ScheduleError(
            f"schedule covers {len(schedule.orders)} subtrees, tree has {len(roots)}"
        )
    for t, seq in zip(roots, schedule.orders):
        if tuple(sorted(seq)) != tree.subtrees[t]:
            raise ScheduleError(f"order for subtree {t} is not a permutation of it")


def _predecessors(tree: SinkTree, schedule: Schedule, i: int) -> tuple[int, ...]:
    """Nodes of i's subtree scheduled before i."""
    t = tree.subtree_root_of[i]
    for root, seq in zip(tree.subtree_roots, schedule.orders):
        if root == t:
            if i not in seq:
                raise ScheduleError(f"node {i} missing from its subtree order")
            return seq[: seq.index(i)]
    raise ScheduleError(f"schedule has no order for subtree {t}")


# --- elementary quantities ------------------------------------------------


def transmission_time(tree: SinkTree, alloc: Allocation, i: int) -> float:
    """Store-and-forward delivery time of i's own subtask; 0 at the master."""
    return alloc.y[i] * tree.path_inv_rate[i]


def waiting_time(tree: SinkTree, schedule: Schedule, alloc: Allocation, i: int) -> float:
    """Channel time spent on earlier subtasks over the path edges shared with them."""
    if i == 0:
        return 0.0
    return sum(
        alloc.y[j] * tree.shared_prefix_inv_rate(i, j)
        for j in _predecessors(tree, schedule, i)
    )


def compute_time(srv: ServerParams, y: float, b: float = DEFAULT_B) -> float:
    """Local processing time of y bits at b cycles per bit."""
    return y * b / srv.cpu_freq


def relay_load(tree: SinkTree, alloc: Allocation, i: int, j: int) -> float:
    """Bits node i forwards onto its child j: the whole load under j."""
    if tree.parent[j] != i:
        raise ParameterError(f"node {j} is not a child of node {i}")
    return sum(alloc.y[k] for k in tree.descendants(j))


def node_energy(tree: SinkTree, alloc: Allocation, i: int, b: float = DEFAULT_B) -> float:
    """Compute energy plus transmit energy for relaying into each child."""
    srv = tree.servers[i]
    e = srv.switched_cap * alloc.y[i] * b * srv.cpu_freq**2
    for j in tree.children[i]:
        e += srv.tx_power * relay_load(tree, alloc, i, j) / tree.edge_rate[j]
    return e


def node_cost(
    tree: SinkTree,
    schedule: Schedule,
    alloc: Allocation,
    weights: Weights,
    i: int,
    b: float = DEFAULT_B,
) -> float:
    """Weighted completion-time/energy cost of a single node."""
    t_total = (
        transmission_time(tree, alloc, i)
        + waiting_time(tree, schedule, alloc, i)
        + compute_time(tree.servers[i], alloc.y[i], b)
    )
    return weights.w1 * t_total + weights.w2 * node_energy(tree, alloc, i, b)


# --- full breakdown -------------------------------------------------------


@dataclass(frozen=True)
class CostBreakdown:
    """Every per-node term plus the system objective."""

    t_tran: tuple[float, ...]
    t_wait: tuple[float, ...]
    t_comp: tuple[float, ...]
    t_total: tuple[float, ...]
    e_comp: tuple[float, ...]
    e_relay: tuple[float, ...]
    e_total: tuple[float, ...]
    j_node: tuple[float, ...]
    j_system: float

    @property
    def max_time(self) -> float:
        return max(self.t_total)

    @property
    def max_energy(self) -> float:
        return max(self.e_total)


def system_cost(
    tree: SinkTree,
    schedule: Schedule,
    alloc: Allocation,
    weights: Weights,
    b: float = DEFAULT_B,
) -> CostBreakdown:
    """Evaluate the whole cost table for one allocation under one schedule."""
    validate_schedule(tree, schedule)
    n = len(tree)
    if len(alloc.y) != n:
        raise ParameterError(f"allocation has {len(alloc.y)} entries, tree has {n}")

    # load passing through each node: own share plus everything below
    under = list(alloc.y)
    for i in range(n - 1, 0, -1):
        under[tree.parent[i]] += under[i]

    t_tran, t_wait, t_comp = [], [], []
    e_comp, e_relay = [], []
    for i in range(n):
        srv = tree.servers[i]
        t_tran.append(transmission_time(tree, alloc, i))
        t_wait.append(waiting_time(tree, schedule, alloc, i))
        t_comp.append(compute_time(srv, alloc.y[i], b))
        e_comp.append(srv.switched_cap * alloc.y[i] * b * srv.cpu_freq**2)
        e_relay.append(
            sum(srv.tx_power * under[j] / tree.edge_rate[j] for j in tree.children[i])
        )
    t_total = [t_tran[i] + t_wait[i] + t_comp[i] for i in range(n)]
    e_total = [e_comp[i] + e_relay[i] for i in range(n)]
    j_node = [weights.w1 * t_total[i] + weights.w2 * e_total[i] for i in range(n)]
    return CostBreakdown(
        t_tran=tuple(t_tran),
        t_wait=tuple(t_wait),
        t_comp=tuple(t_comp),
        t_total=tuple(t_total),
        e_comp=tuple(e_comp),
        e_relay=tuple(e_relay),
        e_total=tuple(e_total),
        j_node=tuple(j_node),
        j_system=max(j_node),
    )


# --- linear form ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CostCoefficients:
    """J_i(y) = sum_k a[i, k] * y_k for a fixed tree and schedule."""

    a: np.ndarray
    b_comp: float

    def node_cost(self, y: np.ndarray, i: int) -> float:
        return float(self.a[i] @ y)

    def system_cost(self, y: np.ndarray) -> float:
        return float(np.max(self.a @ y))


def _static_matrix(tree: SinkTree, weights: Weights, b: float) -> np.ndarray:
    """Schedule-independent part: own time/energy plus ancestors' relay energy."""
    n = len(tree)
    a = np.zeros((n, n))
    for i in range(n):
        srv = tree.servers[i]
        a[i, i] += weights.w1 * (tree.path_inv_rate[i] + b / srv.cpu_freq)
        a[i, i] += weights.w2 * srv.switched_cap * b * srv.cpu_freq**2
        # every bit destined to i crosses each ancestor's outgoing radio
        path = tree.paths[i]
        for anc, nxt in zip(path, path[1:]):
            a[anc, i] += weights.w2 * tree.servers[anc].tx_power / tree.edge_rate[nxt]
    return a


def _add_waiting(a: np.ndarray, tree: SinkTree, schedule: Schedule, w1: float) -> None:
    for seq in schedule.orders:
        for pos, i in enumerate(seq):
            for j in seq[:pos]:
                a[i, j] += w1 * tree.shared_prefix_inv_rate(i, j)


def cost_coefficients(
    tree: SinkTree,
    schedule: Schedule,
    weights: Weights,
    b: float = DEFAULT_B,
) -> CostCoefficients:
    validate_schedule(tree, schedule)
    a = _static_matrix(tree, weights, b)
    _add_waiting(a, tree, schedule, weights.w1)
    a.flags.writeable = False
    return CostCoefficients(a=a, b_comp=b)
