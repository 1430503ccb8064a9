"""Shared builders for the test suite."""

from __future__ import annotations

import random

import pytest

from oracles import PlainTree
from treeload import NetworkGraph, ServerParams, build_sink_tree
from treeload.tree import SinkTree
from treeload.units import gbps_to_bps, ghz_to_hz

# parameter regime used across randomized tests: single-digit seconds and
# joules per Gbit at one cycle per bit, so neither objective term vanishes
B_COMP = 1.0
FREQ_GHZ = (0.5, 8.0)
RATE_GBPS = (0.5, 20.0)
CAP_RANGE = (5e-29, 5e-28)
TX_W = (0.5, 4.0)


def make_net(
    parent,
    rates_gbps,
    freqs_ghz,
    caps=None,
    tx_w=None,
) -> NetworkGraph:
    """Network holding exactly the given tree edges (both directions)."""
    n = len(parent)
    caps = caps if caps is not None else [2e-28] * n
    tx_w = tx_w if tx_w is not None else [1.0] * n
    servers = tuple(
        ServerParams(
            id=i,
            cpu_freq=ghz_to_hz(freqs_ghz[i]),
            tx_power=tx_w[i],
            switched_cap=caps[i],
        )
        for i in range(n)
    )
    links = {}
    for i in range(1, n):
        r = gbps_to_bps(rates_gbps[i])
        links[(parent[i], i)] = r
        links[(i, parent[i])] = r
    return NetworkGraph(servers=servers, links=links)


def make_tree(parent, rates_gbps, freqs_ghz, caps=None, tx_w=None) -> SinkTree:
    return build_sink_tree(make_net(parent, rates_gbps, freqs_ghz, caps, tx_w))


def rand_tree(rng: random.Random, n: int) -> SinkTree:
    """Random shape and parameters; ids may get relabeled by the builder."""
    parent = [-1] + [rng.randrange(i) for i in range(1, n)]
    rates = [0.0] + [rng.uniform(*RATE_GBPS) for _ in range(n - 1)]
    freqs = [rng.uniform(*FREQ_GHZ) for _ in range(n)]
    caps = [rng.uniform(*CAP_RANGE) for _ in range(n)]
    tx = [rng.uniform(*TX_W) for _ in range(n)]
    return make_tree(parent, rates, freqs, caps, tx)


def plain_of(tree: SinkTree) -> PlainTree:
    """Expose a tree's raw arrays to the reference implementations."""
    return PlainTree(
        parent=tree.parent,
        rate=tree.edge_rate,
        freq=tuple(s.cpu_freq for s in tree.servers),
        cap=tuple(s.switched_cap for s in tree.servers),
        tx=tuple(s.tx_power for s in tree.servers),
    )


@pytest.fixture
def rng():
    return random.Random(20240817)
