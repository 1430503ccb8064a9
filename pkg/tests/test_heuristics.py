import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import B_COMP, make_tree, rand_tree
from treeload import (
    GaParams,
    LpParams,
    NpParams,
    ParameterError,
    Weights,
    baseline_local,
    baseline_master_worker,
    baseline_multi_hop,
    baseline_partial,
    canonical_schedule,
    cmo,
    ga,
    level_prune,
    node_prune,
    solve_fixed_order,
)
from treeload.costs import validate_schedule
from treeload.heuristics import (
    _mutate,
    _ordered_crossover,
    local_cost,
    partial_offload_cost,
)

W = Weights(0.5, 0.05)
Y = 1e9


def test_param_validation():
    with pytest.raises(ParameterError):
        NpParams(theta_p=-0.1)
    with pytest.raises(ParameterError):
        NpParams(theta_p=1.1)
    with pytest.raises(ParameterError):
        LpParams(xi=-1)
    with pytest.raises(ParameterError):
        GaParams(population=1)
    with pytest.raises(ParameterError):
        GaParams(mutation_op="invert")
    with pytest.raises(ParameterError):
        GaParams(elite_frac=1.5)


def test_partial_offload_rejects_master():
    tree = rand_tree(random.Random(0), 4)
    with pytest.raises(ParameterError):
        partial_offload_cost(tree, 0, Y, W, b=B_COMP)


def test_partial_offload_no_worse_than_local():
    # the solo split keeps all-local as a feasible point
    for seed in range(10):
        tree = rand_tree(random.Random(seed), 5)
        z0 = local_cost(tree, Y, W, b=B_COMP)
        for i in range(1, len(tree)):
            zp = partial_offload_cost(tree, i, Y, W, b=B_COMP)
            assert zp <= z0 * (1 + 1e-9)


def test_node_prune_theta_one_keeps_master_only():
    tree = rand_tree(random.Random(1), 6)
    pruned, relays = node_prune(tree, NpParams(theta_p=1.0), Y, W, b=B_COMP)
    assert len(pruned) == 1
    assert relays == frozenset()


def test_node_prune_keeps_relays_on_the_route():
    # middle node is a weak computer but the only route to a strong one
    tree = make_tree(
        [-1, 0, 1],
        [0.0, 10.0, 10.0],
        [2.0, 0.05, 8.0],
        caps=[2e-28, 5e-18, 2e-28],
    )
    pruned, relays = node_prune(tree, NpParams(theta_p=0.05), Y, W, b=B_COMP)
    assert len(pruned) == 3
    assert relays == {1}
    sol = cmo(pruned, Y, W, relays, b=B_COMP)
    assert sol.allocation.y[1] == 0.0


def test_node_prune_selection_rule_is_strict():
    # benefit must strictly exceed theta_p; theta at the exact benefit drops it
    tree = rand_tree(random.Random(2), 4)
    z0 = local_cost(tree, Y, W, b=B_COMP)
    benefits = [
        (z0 - partial_offload_cost(tree, i, Y, W, b=B_COMP)) / z0
        for i in range(1, len(tree))
    ]
    theta = max(benefits)
    pruned, _ = node_prune(tree, NpParams(theta_p=theta), Y, W, b=B_COMP)
    assert len(pruned) == 1


def test_level_prune_endpoints():
    tree = rand_tree(random.Random(3), 7)
    only_master = level_prune(tree, LpParams(xi=0))
    assert len(only_master) == 1
    full = level_prune(tree, LpParams(xi=tree.height))
    assert len(full) == len(tree)
    with pytest.raises(ParameterError):
        level_prune(tree, LpParams(xi=tree.height + 1))


def test_level_prune_cuts_below_the_line():
    tree = make_tree([-1, 0, 1, 2, 0], [0, 10, 10, 10, 10], [2] * 5)
    cut = level_prune(tree, LpParams(xi=2))
    assert len(cut) == 4
    assert max(cut.depth_of) == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_crossover_yields_permutations(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 9)
    a = tuple(rng.sample(range(n), n))
    b = tuple(rng.sample(range(n), n))
    child = _ordered_crossover(rng, a, b)
    assert sorted(child) == sorted(a)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=100_000), st.sampled_from(["swap", "shuffle"]))
def test_mutation_yields_permutations(seed, op):
    rng = random.Random(seed)
    chrom = []
    for k in range(rng.randint(1, 3)):
        size = rng.randint(1, 5)
        pool = range(10 * k, 10 * k + size)
        chrom.append(tuple(rng.sample(pool, size)))
    chrom = tuple(chrom)
    out = _mutate(rng, chrom, op)
    assert len(out) == len(chrom)
    for seq, ref in zip(out, chrom):
        assert sorted(seq) == sorted(ref)


def test_ga_is_deterministic_per_seed():
    tree = rand_tree(random.Random(4), 7)
    p = GaParams(population=6, generations=8, rng_seed=33)
    a = ga(tree, Y, W, p, b=B_COMP)
    b = ga(tree, Y, W, p, b=B_COMP)
    assert a.cost == b.cost
    assert a.schedule == b.schedule
    c = ga(tree, Y, W, GaParams(population=6, generations=8, rng_seed=34), b=B_COMP)
    assert c.schedule != a.schedule or c.cost == pytest.approx(a.cost)


def test_ga_returns_valid_schedule_and_tag():
    tree = rand_tree(random.Random(5), 8)
    sol = ga(tree, Y, W, GaParams(population=5, generations=4), b=B_COMP)
    validate_schedule(tree, sol.schedule)
    assert sol.solver_tag == "ga"
    assert sol.schedules_evaluated >= 1


def test_ga_more_generations_never_hurt():
    tree = rand_tree(random.Random(6), 8)
    short = ga(tree, Y, W, GaParams(population=6, generations=2, rng_seed=7), b=B_COMP)
    long = ga(tree, Y, W, GaParams(population=6, generations=25, rng_seed=7), b=B_COMP)
    assert long.cost <= short.cost * (1 + 1e-12)


def test_ga_finds_exact_optimum_with_budget():
    tree = rand_tree(random.Random(7), 6)
    ref = cmo(tree, Y, W, b=B_COMP)
    sol = ga(tree, Y, W, GaParams(population=24, generations=30, rng_seed=0), b=B_COMP)
    assert sol.cost <= ref.cost * (1 + 1e-6)


def test_ga_respects_forced_zero():
    tree = rand_tree(random.Random(8), 6)
    sol = ga(tree, Y, W, GaParams(population=4, generations=3), frozenset({1}), b=B_COMP)
    assert sol.allocation.y[1] == 0.0


def test_local_baseline_piles_on_master():
    tree = rand_tree(random.Random(9), 5)
    sol = baseline_local(tree, Y, W, b=B_COMP)
    assert sol.allocation.y[0] == Y
    assert sum(sol.allocation.y[1:]) == 0.0
    assert sol.solver_tag == "baseline-local"


def test_partial_baseline_uses_master_plus_one_hop():
    tree = rand_tree(random.Random(10), 7)
    sol = baseline_partial(tree, Y, W, b=B_COMP)
    support = {i for i, v in enumerate(sol.allocation.y) if v > 0.0}
    one_hop = set(tree.children[0]) | {0}
    assert support <= one_hop
    # at most one helper
    assert len(support - {0}) <= 1


def test_partial_baseline_solo_tree_degenerates_to_local():
    tree = make_tree([-1], [0.0], [2.0])
    sol = baseline_partial(tree, Y, W, b=B_COMP)
    assert sol.allocation.y == (Y,)


def test_master_worker_baseline_stays_one_hop():
    tree = rand_tree(random.Random(11), 8)
    sol = baseline_master_worker(tree, Y, W, b=B_COMP)
    support = {i for i, v in enumerate(sol.allocation.y) if v > 0.0}
    assert support <= set(tree.children[0]) | {0}


def test_multi_hop_baseline_uses_single_node():
    tree = rand_tree(random.Random(12), 7)
    sol = baseline_multi_hop(tree, Y, W, b=B_COMP)
    support = [i for i, v in enumerate(sol.allocation.y) if v > 0.0]
    assert len(support) == 1
    # it picked the cheapest single host
    i = support[0]
    for j in range(len(tree)):
        y = tuple(Y if k == j else 0.0 for k in range(len(tree)))
        from treeload import Allocation, system_cost

        other = system_cost(
            tree, canonical_schedule(tree), Allocation(y=y, total=Y), W, B_COMP
        ).j_system
        assert sol.cost <= other * (1 + 1e-12)


def test_exact_solver_dominates_every_baseline():
    for seed in range(8):
        tree = rand_tree(random.Random(seed + 400), 6)
        z = cmo(tree, Y, W, b=B_COMP).cost
        for fn in (
            baseline_local,
            baseline_partial,
            baseline_master_worker,
            baseline_multi_hop,
        ):
            assert z <= fn(tree, Y, W, b=B_COMP).cost * (1 + 1e-9)


def test_time_only_baselines_nest():
    w = Weights(1.0, 0.0)
    for seed in range(8):
        tree = rand_tree(random.Random(seed + 500), 7)
        z_local = baseline_local(tree, Y, w, b=B_COMP).cost
        z_part = baseline_partial(tree, Y, w, b=B_COMP).cost
        z_mw = baseline_master_worker(tree, Y, w, b=B_COMP).cost
        assert z_mw <= z_part * (1 + 1e-9)
        assert z_part <= z_local * (1 + 1e-9)
