"""Executable sweeps of the boundary-size properties of complete binary trees.

Every sweep works on the tree viewed as a graph and counts the sets it
checked and the sets that violate the bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .graph import node_boundary, tree_as_graph
from .pairing import all_slots, random_pairing
from .vtree import VirtualTree


@dataclass
class SweepResult:
    name: str
    leaves: int
    checked: int = 0
    violations: int = 0
    examples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def record(self, good: bool, witness) -> None:
        self.checked += 1
        if not good:
            self.violations += 1
            if len(self.examples) < 5:
                self.examples.append(witness)


def _subsets(items):
    """All subsets of ``items`` as frozensets, via bitmasks."""
    items = list(items)
    for mask in range(1 << len(items)):
        yield frozenset(items[i] for i in range(len(items)) if mask >> i & 1)


def _components(graph, subset) -> int:
    left = set(subset)
    count = 0
    while left:
        count += 1
        stack = [left.pop()]
        while stack:
            u = stack.pop()
            for v in graph.adj[u]:
                if v in left:
                    left.remove(v)
                    stack.append(v)
    return count


def connected_internal_sets(tree: VirtualTree) -> SweepResult:
    """|dS| >= |S| + 1 for every connected set of internal nodes, and
    >= |S| + 2 when the root is not in S."""
    graph = tree_as_graph(tree)
    result = SweepResult("connected-internal", tree.num_leaves)
    for s in _subsets(tree.internals()):
        if not s or _components(graph, s) != 1:
            continue
        need = len(s) + (1 if tree.root in s else 2)
        result.record(len(node_boundary(graph, s)) >= need, sorted(s))
    return result


def general_internal_sets(tree: VirtualTree) -> SweepResult:
    """|dS| >= |S| + m + 1 for S among non-root internal nodes with m
    components."""
    graph = tree_as_graph(tree)
    result = SweepResult("general-internal", tree.num_leaves)
    candidates = [v for v in tree.internals() if v != tree.root]
    for s in _subsets(candidates):
        if not s:
            continue
        m = _components(graph, s)
        result.record(len(node_boundary(graph, s)) >= len(s) + m + 1, sorted(s))
    return result


def subtree_internal_sets(tree: VirtualTree) -> SweepResult:
    """Within every subtree X and for S inside X's internal nodes,
    |dS restricted to X| >= |S|, plus one when S is nonempty."""
    graph = tree_as_graph(tree)
    result = SweepResult("subtree-internal", tree.num_leaves)
    for x in tree.inorder():
        vx = tree.subtree(x)
        for s in _subsets(tree.internals(x)):
            need = len(s) + (1 if s else 0)
            inside = node_boundary(graph, s) & vx
            result.record(len(inside) >= need, (x, sorted(s)))
    return result


def _occupied_bound_holds(tree, graph, leaf_set, images) -> tuple[bool, object]:
    q = set(leaf_set) | set(images)
    boundary = node_boundary(graph, q)
    for vx in tree.maximal_occupied_subtrees(leaf_set):
        holes = len(vx - q)
        if 2 * len(boundary & vx) < holes:
            return False, (sorted(leaf_set), sorted(images), sorted(vx))
    return True, None


def occupied_subtrees_exhaustive(tree: VirtualTree) -> SweepResult:
    """For every maximal S-occupied subtree X and Q = S + Pi(S):
    2 |dQ restricted to X| >= |X minus Q|.

    The bound depends on a pairing only through the image set Pi(S), so
    sweeping every leaf set S against every equally sized set of internal
    slots covers all (S, Pi) combinations.
    """
    graph = tree_as_graph(tree)
    leaves = tree.leaves()
    slots = all_slots(tree)
    result = SweepResult("occupied-subtree", tree.num_leaves)
    for k in range(1, len(leaves) + 1):
        for s in combinations(leaves, k):
            for image in combinations(slots, k):
                good, witness = _occupied_bound_holds(tree, graph, s, (sl.node for sl in image))
                result.record(good, witness)
    return result


def occupied_subtrees_sampled(tree: VirtualTree, samples: int, rng) -> SweepResult:
    """Random (S, Pi): Pi uniform; S keeps each leaf with a density drawn
    uniformly per sample, so both sparse and dense sets appear."""
    graph = tree_as_graph(tree)
    leaves = tree.leaves()
    result = SweepResult("occupied-subtree", tree.num_leaves)
    while result.checked < samples:
        density = rng.random()
        s = [l for l in leaves if rng.random() < density]
        if not s:
            continue
        pairing = random_pairing(tree, rng)
        good, witness = _occupied_bound_holds(tree, graph, s, (pairing[l].node for l in s))
        result.record(good, witness)
    return result
