import pytest

from treeload import TOPOLOGIES, Weights, named_topology
from treeload.costs import canonical_schedule, validate_schedule
from treeload.verification import check_tree


def test_registry_has_the_four_shapes():
    assert set(TOPOLOGIES) == {"deep_chain", "wide_shallow", "mixed", "two_subtree"}


def test_unknown_name_lists_choices():
    with pytest.raises(KeyError) as exc:
        named_topology("ring")
    assert "deep_chain" in str(exc.value)


@pytest.mark.parametrize("name", sorted(TOPOLOGIES))
def test_topologies_are_well_formed(name):
    topo = named_topology(name)
    assert topo.name == name
    assert topo.task_size > 0
    assert topo.b_comp > 0
    assert isinstance(topo.weights, Weights)
    assert topo.summary
    assert all(r.ok for r in check_tree(topo.tree, topo.network))
    validate_schedule(topo.tree, canonical_schedule(topo.tree))


@pytest.mark.parametrize("name", sorted(TOPOLOGIES))
def test_topologies_mix_hardware_classes(name):
    # every shipped tree carries both efficient and legacy silicon
    topo = named_topology(name)
    caps = {s.switched_cap for s in topo.tree.servers}
    assert len(caps) == 2


def test_shapes_match_their_names():
    deep = named_topology("deep_chain").tree
    assert deep.height == len(deep) - 1
    wide = named_topology("wide_shallow").tree
    assert wide.height <= 2
    two = named_topology("two_subtree").tree
    assert len(two.subtree_roots) == 2
