"""Approximate solvers and comparison baselines.

Two pruning passes shrink the tree before an exact solve: node pruning
drops servers whose solo offloading benefit is below a threshold, level
pruning cuts everything deeper than a fixed depth.  A small genetic
algorithm searches the schedule space directly when enumeration is too
expensive.  The four baselines at the bottom are the usual strawmen:
local-only, one-neighbor split, master-worker, and single-node full
offload.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace

from .costs import Allocation, Schedule, Weights, canonical_schedule, system_cost
from .errors import ParameterError
from .solvers import Solution, solve_fixed_order
from .tree import MASTER_ID, SinkTree, prune_tree
from .units import DEFAULT_B


@dataclass(frozen=True)
class NpParams:
    """Node pruning: keep a server only if its solo benefit beats theta_p."""

    theta_p: float

    def __post_init__(self):
        if not 0.0 <= self.theta_p <= 1.0:
            raise ParameterError(f"theta_p must be in [0, 1], got {self.theta_p}")


@dataclass(frozen=True)
class LpParams:
    """Level pruning: retain the root plus the top xi tree levels."""

    xi: int

    def __post_init__(self):
        if self.xi < 0:
            raise ParameterError(f"xi must be >= 0, got {self.xi}")


@dataclass(frozen=True)
class GaParams:
    population: int = 4
    generations: int = 100
    elite_frac: float = 0.2
    mutation_prob: float = 0.05
    mutation_op: str = "swap"
    rng_seed: int = 0

    def __post_init__(self):
        if self.population < 2:
            raise ParameterError("population must be >= 2")
        if self.generations < 1:
            raise ParameterError("generations must be >= 1")
        if not 0.0 <= self.elite_frac <= 1.0:
            raise ParameterError("elite_frac must be in [0, 1]")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ParameterError("mutation_prob must be in [0, 1]")
        if self.mutation_op not in ("swap", "shuffle"):
            raise ParameterError(f"unknown mutation_op {self.mutation_op!r}")


def local_cost(
    tree: SinkTree, task_size: float, weights: Weights, *, b: float = DEFAULT_B
) -> float:
    """Cost of keeping the whole task on the master."""
    return baseline_local(tree, task_size, weights, b=b).cost


def partial_offload_cost(
    tree: SinkTree,
    i: int,
    task_size: float,
    weights: Weights,
    *,
    b: float = DEFAULT_B,
) -> float:
    """Best achievable cost when only the master and node i may compute.

    Every other node is forced to zero but still relays (and pays relay
    energy) if it sits on the path to i.
    """
    if i == MASTER_ID:
        raise ParameterError("partial offloading needs a non-master node")
    if not 0 <= i < len(tree):
        raise ParameterError(f"node {i} not in tree")
    forced = frozenset(range(len(tree))) - {MASTER_ID, i}
    sol = solve_fixed_order(
        tree, canonical_schedule(tree), task_size, weights, forced, b=b
    )
    return sol.cost


def node_prune(
    tree: SinkTree,
    params: NpParams,
    task_size: float,
    weights: Weights,
    *,
    b: float = DEFAULT_B,
) -> tuple[SinkTree, frozenset[int]]:
    """Drop servers whose solo offloading gain is at most theta_p.

    A node is selected when (z0 - zp_i)/z0 > theta_p, z0 being the
    all-local cost and zp_i the best master+node-i split.  Unselected
    nodes are removed outright, except those still needed to reach a
    selected descendant: they stay as zero-load relays.

    Returns the pruned tree (new ids) and the relay-only id set in it.
    """
    z0 = local_cost(tree, task_size, weights, b=b)
    unselected = set()
    for i in range(1, len(tree)):
        if z0 > 0.0:
            zp = partial_offload_cost(tree, i, task_size, weights, b=b)
            benefit = (z0 - zp) / z0
        else:
            benefit = 0.0
        if benefit <= params.theta_p:
            unselected.add(i)
    return prune_tree(tree, unselected)


def level_prune(tree: SinkTree, params: LpParams) -> SinkTree:
    """Keep the root plus levels 1..xi, cut everything deeper."""
    if params.xi > tree.height:
        raise ParameterError(
            f"xi={params.xi} exceeds tree height {tree.height}"
        )
    too_deep = {i for i in range(len(tree)) if tree.depth_of[i] > params.xi}
    pruned, relays = prune_tree(tree, too_deep)
    if relays:
        raise AssertionError("depth cut cannot strand relays")
    return pruned


# ---------------------------------------------------------------------------
# genetic algorithm over offloading orders


def _ordered_crossover(
    rng: random.Random, a: tuple[int, ...], bseq: tuple[int, ...]
) -> tuple[int, ...]:
    """Classic OX: keep a random slice of `a`, fill the rest in `bseq` order."""
    n = len(a)
    if n <= 1:
        return a
    lo = rng.randrange(n)
    hi = rng.randrange(n)
    if lo > hi:
        lo, hi = hi, lo
    kept = a[lo : hi + 1]
    taken = set(kept)
    filler = iter(x for x in bseq if x not in taken)
    child = [next(filler) for _ in range(lo)]
    child.extend(kept)
    child.extend(filler)
    return tuple(child)


def _mutate(
    rng: random.Random, chrom: tuple[tuple[int, ...], ...], op: str
) -> tuple[tuple[int, ...], ...]:
    mutable = [k for k, seq in enumerate(chrom) if len(seq) >= 2]
    if not mutable:
        return chrom
    k = mutable[rng.randrange(len(mutable))]
    seq = list(chrom[k])
    if op == "swap":
        p, q = rng.sample(range(len(seq)), 2)
        seq[p], seq[q] = seq[q], seq[p]
    else:
        rng.shuffle(seq)
    out = list(chrom)
    out[k] = tuple(seq)
    return tuple(out)


def ga(
    tree: SinkTree,
    task_size: float,
    weights: Weights,
    params: GaParams,
    forced_zero: frozenset[int] = frozenset(),
    *,
    b: float = DEFAULT_B,
) -> Solution:
    """Search offloading orders with a seeded genetic algorithm.

    A chromosome is one permutation per subtree; fitness is the optimal
    split cost for that fixed schedule.  Each generation carries
    ceil(elite_frac * population) elites (at least one), fills the rest
    by fitness-proportional selection on 1/cost with per-subtree ordered
    crossover, and mutates offspring with probability mutation_prob.
    Deterministic for a given rng_seed.  Returns the best solution seen
    across all generations.
    """
    rng = random.Random(params.rng_seed)
    groups = [list(tree.subtrees[t]) for t in tree.subtree_roots]

    def random_chromosome() -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(rng.sample(g, len(g))) for g in groups)

    memo: dict[tuple[tuple[int, ...], ...], Solution] = {}

    def fitness(chrom: tuple[tuple[int, ...], ...]) -> Solution:
        sol = memo.get(chrom)
        if sol is None:
            sol = solve_fixed_order(
                tree, Schedule(orders=chrom), task_size, weights, forced_zero, b=b
            )
            memo[chrom] = sol
        return sol

    population = [random_chromosome() for _ in range(params.population)]
    best = min((fitness(c) for c in population), key=lambda s: s.cost)
    n_elite = max(1, math.ceil(params.elite_frac * params.population))

    for _ in range(params.generations):
        ranked = sorted(population, key=lambda c: fitness(c).cost)
        next_pop = ranked[:n_elite]
        costs = [fitness(c).cost for c in population]
        zero = next((c for c, z in zip(population, costs) if z == 0.0), None)
        while len(next_pop) < params.population:
            if zero is not None:
                pa = pb = zero
            else:
                pa, pb = rng.choices(
                    population, weights=[1.0 / z for z in costs], k=2
                )
            child = tuple(
                _ordered_crossover(rng, sa, sb) for sa, sb in zip(pa, pb)
            )
            if rng.random() < params.mutation_prob:
                child = _mutate(rng, child, params.mutation_op)
            next_pop.append(child)
        population = next_pop
        gen_best = min((fitness(c) for c in population), key=lambda s: s.cost)
        if gen_best.cost < best.cost:
            best = gen_best

    return replace(best, solver_tag="ga", schedules_evaluated=len(memo))


# ---------------------------------------------------------------------------
# literature baselines


def _evaluated_at(
    tree: SinkTree,
    schedule: Schedule,
    y: tuple[float, ...],
    task_size: float,
    weights: Weights,
    b: float,
    tag: str,
) -> Solution:
    alloc = Allocation(y=y, total=task_size)
    breakdown = system_cost(tree, schedule, alloc, weights, b)
    return Solution(
        tree=tree,
        weights=weights,
        b_comp=b,
        task_size=task_size,
        allocation=alloc,
        schedule=schedule,
        cost=breakdown.j_system,
        breakdown=breakdown,
        solver_tag=tag,
    )


def baseline_local(
    tree: SinkTree, task_size: float, weights: Weights, *, b: float = DEFAULT_B
) -> Solution:
    """Everything stays on the master."""
    y = (task_size,) + (0.0,) * (len(tree) - 1)
    return _evaluated_at(
        tree, canonical_schedule(tree), y, task_size, weights, b, "baseline-local"
    )


def _time_optimal_subset(
    tree: SinkTree, keep: frozenset[int], task_size: float, b: float
) -> Allocation:
    """Completion-time-optimal split restricted to `keep` nodes."""
    forced = frozenset(range(len(tree))) - keep
    sol = solve_fixed_order(
        tree, canonical_schedule(tree), task_size, Weights(1.0, 0.0), forced, b=b
    )
    return sol.allocation


def baseline_partial(
    tree: SinkTree, task_size: float, weights: Weights, *, b: float = DEFAULT_B
) -> Solution:
    """Split between the master and its single best one-hop neighbor.

    The split and the neighbor choice minimize completion time; the
    reported cost re-evaluates that allocation at the given weights.
    """
    sched = canonical_schedule(tree)
    best: Solution | None = None
    best_time = math.inf
    for j in tree.children[MASTER_ID]:
        alloc = _time_optimal_subset(tree, frozenset({MASTER_ID, j}), task_size, b)
        timed = system_cost(tree, sched, alloc, Weights(1.0, 0.0), b)
        if timed.j_system < best_time:
            best_time = timed.j_system
            best = _evaluated_at(
                tree, sched, alloc.y, task_size, weights, b, "baseline-partial"
            )
    if best is None:
        sol = baseline_local(tree, task_size, weights, b=b)
        return replace(sol, solver_tag="baseline-partial")
    return best


def baseline_master_worker(
    tree: SinkTree, task_size: float, weights: Weights, *, b: float = DEFAULT_B
) -> Solution:
    """Time-optimal split over the master and all one-hop neighbors.

    One-hop nodes root their own subtrees, so transmissions are
    concurrent and nothing waits.  Cost is reported at the given weights.
    """
    keep = frozenset({MASTER_ID}) | frozenset(tree.children[MASTER_ID])
    alloc = _time_optimal_subset(tree, keep, task_size, b)
    return _evaluated_at(
        tree,
        canonical_schedule(tree),
        alloc.y,
        task_size,
        weights,
        b,
        "baseline-master-worker",
    )


def baseline_multi_hop(
    tree: SinkTree, task_size: float, weights: Weights, *, b: float = DEFAULT_B
) -> Solution:
    """Ship the whole task to the one node where it costs least.

    Every node, master included, is tried as the sole computer; path
    nodes relay.  Ties go to the smallest id.
    """
    sched = canonical_schedule(tree)
    best: Solution | None = None
    for i in range(len(tree)):
        y = tuple(task_size if k == i else 0.0 for k in range(len(tree)))
        cand = _evaluated_at(
            tree, sched, y, task_size, weights, b, "baseline-multi-hop"
        )
        if best is None or cand.cost < best.cost:
            best = cand
    assert best is not None
    return best
