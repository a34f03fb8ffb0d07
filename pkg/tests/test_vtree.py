import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from treeweave.errors import DomainError
from treeweave.vtree import VirtualTree, build_complete


def spread(tree):
    d = tree.leaf_depths().values()
    return max(d) - min(d)


@pytest.mark.parametrize("n", [2, 4, 8, 512])
def test_build_complete_shape(n):
    tree = build_complete(n)
    tree.audit()
    assert len(tree) == 2 * n - 1
    assert len(tree.internals()) == n - 1
    assert set(tree.leaf_depths().values()) == {int(math.log2(n))}


@pytest.mark.parametrize("n", [0, 1, 3, 6, 100])
def test_build_complete_rejects(n):
    with pytest.raises(DomainError):
        build_complete(n)


@pytest.mark.parametrize("n", [4, 8, 16])
def test_sample_leaf_uniform_on_complete(n):
    tree = build_complete(n)
    rng = random.Random(n)
    counts = Counter(tree.sample_leaf(rng) for _ in range(100_000))
    assert set(counts) == set(tree.leaves())
    assert chisquare([counts[l] for l in tree.leaves()]).pvalue > 0.01


def test_sample_leaf_weighted_on_unbalanced():
    # left subtree with 3 leaves, right child a single leaf
    tree = VirtualTree.from_nested(((None, (None, None)), None))
    right = tree.right[tree.root]
    rng = random.Random(5)
    draws = 100_000
    hits = sum(tree.sample_leaf(rng) == right for _ in range(draws))
    # binomial(1e5, 1/4): sd ~ 137
    assert abs(hits - draws / 4) < 5 * math.sqrt(draws * 3 / 16)


def test_sample_leaf_single_leaf():
    tree = VirtualTree.from_nested(None)
    assert tree.sample_leaf(random.Random(0)) == tree.root


@pytest.mark.slow
def test_sample_leaf_512_frequency_ratio():
    tree = build_complete(512)
    rng = random.Random(42)
    counts = Counter(tree.sample_leaf(rng) for _ in range(1_000_000))
    assert len(counts) == 512
    assert max(counts.values()) / min(counts.values()) < 1.2


def test_insert_pair_on_two_leaves():
    tree = build_complete(2)
    l1 = tree.leaves()[0]
    new_leaf, new_internal = tree.insert_pair(l1)
    tree.audit()
    assert len(tree) == 5
    assert tree.depth(l1) == 2
    assert tree.parent[l1] == tree.parent[new_leaf] == new_internal
    assert tree.leaves() == [l1, new_leaf, tree.leaves()[-1]]


def test_insert_pair_fresh_ids_and_counts():
    tree = build_complete(8)
    before = set(tree.parent)
    at = tree.leaves()[3]
    new = tree.insert_pair(at)
    assert set(tree.parent) - before == set(new)
    assert tree.num_leaves == 9
    assert len(tree.internals()) == 8
    assert tree.leaf_count[tree.root] == 9


def test_insert_then_rebalance_four_leaves():
    tree = build_complete(4)
    l1 = tree.leaves()[0]
    tree.insert_pair(l1)
    assert sorted(tree.leaf_depths().values()) == [2, 2, 2, 3, 3]
    order = tree.leaves()
    tree.rebalance()
    tree.audit()
    assert spread(tree) <= 1
    assert tree.leaves() == order


def test_insert_pair_rejects_internal():
    tree = build_complete(4)
    with pytest.raises(DomainError):
        tree.insert_pair(tree.root)


def test_remove_pair_four_to_three():
    tree = build_complete(4)
    gone_leaf, gone_internal = tree.remove_pair(tree.leaves()[2])
    tree.audit()
    assert tree.num_leaves == 3
    assert len(tree.internals()) == 2
    assert gone_leaf not in tree and gone_internal not in tree


def test_remove_pair_prefers_given_deepest_leaf():
    tree = build_complete(8)
    leaf = tree.leaves()[5]
    parent = tree.parent[leaf]
    assert tree.remove_pair(leaf) == (leaf, parent)


def test_remove_pair_picks_a_deepest_leaf():
    tree = VirtualTree.from_nested(((None, (None, None)), None))
    shallow = tree.right[tree.root]
    gone_leaf, _ = tree.remove_pair(shallow)
    assert gone_leaf != shallow
    tree.audit()
    assert sorted(tree.leaf_depths().values()) == [1, 2, 2]


def test_remove_pair_two_leaves_is_error():
    tree = build_complete(2)
    with pytest.raises(DomainError):
        tree.remove_pair(tree.leaves()[0])


def test_remove_down_to_two():
    tree = build_complete(8)
    rng = random.Random(1)
    while tree.num_leaves > 2:
        tree.remove_pair(rng.choice(tree.leaves()))
        tree.audit()
    assert len(tree) == 3


def test_remove_pair_keeps_height_map():
    tree = build_complete(16)
    rng = random.Random(3)
    for _ in range(5):
        tree.insert_pair(tree.sample_leaf(rng))
    heights = tree.heights()
    for _ in range(8):
        tree.remove_pair(rng.choice(tree.leaves()), heights)
        assert heights == tree.heights()


def test_rebalance_complete_is_noop():
    tree = build_complete(64)
    assert tree.rebalance() == 0


def test_rebalance_left_chain():
    tree = VirtualTree.from_nested((((None, None), None), None))
    order = tree.leaves()
    rotations = tree.rebalance()
    tree.audit()
    assert rotations > 0
    assert tree.leaves() == order
    assert set(tree.leaf_depths().values()) == {2}


def test_rebalance_after_churn_512():
    tree = build_complete(512)
    rng = random.Random(9)
    for _ in range(51):
        tree.insert_pair(tree.sample_leaf(rng))
    heights = tree.heights()
    for _ in range(51):
        tree.remove_pair(rng.choice(tree.leaves()), heights)
    tree.rebalance()
    tree.audit()
    assert spread(tree) <= 1


def test_rotations_preserve_order_and_counts():
    tree = build_complete(8)
    order = list(tree.inorder())
    tree.rotate_right(tree.root)
    tree.audit()
    assert list(tree.inorder()) == order
    tree.rotate_left(tree.root)
    tree.audit()
    assert list(tree.inorder()) == order


def nested_trees(max_leaves=24):
    return st.recursive(st.none(), lambda kids: st.tuples(kids, kids), max_leaves=max_leaves)


@settings(max_examples=150, deadline=None)
@given(nested_trees(), st.randoms(use_true_random=False))
def test_rebalance_properties(shape, rng):
    tree = VirtualTree.from_nested(shape)
    order = tree.leaves()
    ids = set(tree.parent)
    tree.rebalance()
    tree.audit()
    assert spread(tree) <= 1
    assert tree.leaves() == order
    assert set(tree.parent) == ids
    assert tree.rebalance() == 0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.booleans(), max_size=60), st.randoms(use_true_random=False))
def test_mutation_sequences_keep_invariants(ops, rng):
    tree = build_complete(4)
    for grow in ops:
        if grow or tree.num_leaves <= 2:
            tree.insert_pair(rng.choice(tree.leaves()))
        else:
            tree.remove_pair(rng.choice(tree.leaves()))
        tree.audit()
        assert tree.num_leaves == len(tree.internals()) + 1
        assert tree.leaf_count[tree.root] == tree.num_leaves
    tree.rebalance()
    tree.audit()
    assert spread(tree) <= 1


def test_maximal_occupied_siblings():
    tree = build_complete(4)
    l = tree.leaves()
    parent = tree.parent[l[0]]
    assert tree.maximal_occupied_subtrees({l[0], l[1]}) == [frozenset({parent, l[0], l[1]})]


def test_maximal_occupied_non_siblings():
    tree = build_complete(4)
    l = tree.leaves()
    assert tree.maximal_occupied_subtrees({l[0], l[2]}) == [frozenset({l[0]}), frozenset({l[2]})]


def test_maximal_occupied_eight_leaves():
    tree = build_complete(8)
    l = tree.leaves()
    left_half = tree.left[tree.root]
    got = tree.maximal_occupied_subtrees({l[0], l[1], l[2], l[3], l[5]})
    assert got == [tree.subtree(left_half), frozenset({l[5]})]


def test_maximal_occupied_empty_and_bad():
    tree = build_complete(4)
    assert tree.maximal_occupied_subtrees(set()) == []
    with pytest.raises(DomainError):
        tree.maximal_occupied_subtrees({tree.root})


@settings(max_examples=200, deadline=None)
@given(nested_trees(16), st.data())
def test_maximal_occupied_cover_and_maximality(shape, data):
    tree = VirtualTree.from_nested(shape)
    leaves = tree.leaves()
    s = set(data.draw(st.sets(st.sampled_from(leaves))))
    parts = tree.maximal_occupied_subtrees(s)
    covered = set()
    roots = []
    for part in parts:
        top = next(v for v in part if tree.parent[v] not in part)
        roots.append(top)
        assert part == tree.subtree(top)
        part_leaves = {v for v in part if tree.is_leaf(v)}
        assert part_leaves <= s
        assert not covered & part_leaves
        covered |= part_leaves
        p = tree.parent[top]
        if p is not None:
            other = tree.sibling(top)
            assert any(v not in s for v in tree.leaves(other))
    assert covered == s
    parents = [tree.parent[r] for r in roots]
    assert len(set(parents)) == len(parents)


def test_lca_and_heights():
    tree = build_complete(8)
    l = tree.leaves()
    assert tree.lca(l[0], l[1]) == tree.parent[l[0]]
    assert tree.lca(l[0], l[7]) == tree.root
    assert tree.height() == 3
    assert tree.height(tree.parent[l[0]]) == 1
