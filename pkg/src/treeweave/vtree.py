"""Virtual binary tree overlay.

The tree is a full binary tree: every node has zero or two children.  Node
ids are plain integers handed out by a per-tree counter and never reused, so
a node keeps its identity through rotations and splices.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator

from .errors import DomainError


class VirtualTree:
    def __init__(self):
        self.root: int | None = None
        self.parent: dict[int, int | None] = {}
        self.left: dict[int, int | None] = {}
        self.right: dict[int, int | None] = {}
        self.leaf_count: dict[int, int] = {}
        self._next_id = 0

    # -- construction -----------------------------------------------------

    def _new_node(self, parent=None) -> int:
        v = self._next_id
        self._next_id += 1
        self.parent[v] = parent
        self.left[v] = None
        self.right[v] = None
        self.leaf_count[v] = 1
        return v

    @classmethod
    def from_nested(cls, shape) -> "VirtualTree":
        """Build a tree from nested 2-tuples; anything else is a leaf.

        ``((None, None), None)`` is a root whose left child has two leaves.
        Ids are assigned in pre-order.
        """
        tree = cls()

        def build(node, parent):
            v = tree._new_node(parent)
            if isinstance(node, tuple):
                if len(node) != 2:
                    raise DomainError("internal nodes need exactly two children")
                tree.left[v] = build(node[0], v)
                tree.right[v] = build(node[1], v)
                tree.leaf_count[v] = tree.leaf_count[tree.left[v]] + tree.leaf_count[tree.right[v]]
            return v

        tree.root = build(shape, None)
        return tree

    def copy(self) -> "VirtualTree":
        other = VirtualTree()
        other.root = self.root
        other.parent = dict(self.parent)
        other.left = dict(self.left)
        other.right = dict(self.right)
        other.leaf_count = dict(self.leaf_count)
        other._next_id = self._next_id
        return other

    # -- queries ------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.parent)

    def __contains__(self, v) -> bool:
        return v in self.parent

    def is_leaf(self, v: int) -> bool:
        return self.left[v] is None

    def children(self, v: int) -> tuple[int, ...]:
        if self.left[v] is None:
            return ()
        return (self.left[v], self.right[v])

    def sibling(self, v: int) -> int | None:
        p = self.parent[v]
        if p is None:
            return None
        return self.right[p] if self.left[p] == v else self.left[p]

    @property
    def num_leaves(self) -> int:
        return self.leaf_count[self.root]

    def inorder(self, start: int | None = None) -> Iterator[int]:
        stack = []
        v = self.root if start is None else start
        while stack or v is not None:
            while v is not None:
                stack.append(v)
                v = self.left[v]
            v = stack.pop()
            yield v
            v = self.right[v]

    def leaves(self, start: int | None = None) -> list[int]:
        """Leaves in left-to-right order."""
        return [v for v in self.inorder(start) if self.left[v] is None]

    def internals(self, start: int | None = None) -> list[int]:
        """Internal nodes in in-order."""
        return [v for v in self.inorder(start) if self.left[v] is not None]

    def subtree(self, v: int) -> frozenset[int]:
        return frozenset(self.inorder(v))

    def depth(self, v: int) -> int:
        d = 0
        while self.parent[v] is not None:
            v = self.parent[v]
            d += 1
        return d

    def depths(self) -> dict[int, int]:
        out = {self.root: 0}
        stack = [self.root]
        while stack:
            v = stack.pop()
            if self.left[v] is not None:
                d = out[v] + 1
                out[self.left[v]] = d
                out[self.right[v]] = d
                stack.append(self.left[v])
                stack.append(self.right[v])
        return out

    def leaf_depths(self) -> dict[int, int]:
        return {v: d for v, d in self.depths().items() if self.left[v] is None}

    def heights(self) -> dict[int, int]:
        """Height of every subtree (a leaf has height 0)."""
        out = {}
        for v in self._postorder():
            if self.left[v] is None:
                out[v] = 0
            else:
                out[v] = 1 + max(out[self.left[v]], out[self.right[v]])
        return out

    def height(self, v: int | None = None) -> int:
        v = self.root if v is None else v
        best = 0
        stack = [(v, 0)]
        while stack:
            u, d = stack.pop()
            if self.left[u] is None:
                best = max(best, d)
            else:
                stack.append((self.left[u], d + 1))
                stack.append((self.right[u], d + 1))
        return best

    def ancestors(self, v: int) -> Iterator[int]:
        """``v`` itself, then its ancestors up to the root."""
        while v is not None:
            yield v
            v = self.parent[v]

    def lca(self, a: int, b: int) -> int:
        seen = set(self.ancestors(a))
        for u in self.ancestors(b):
            if u in seen:
                return u
        raise DomainError(f"nodes {a} and {b} are not in the same tree")

    def _postorder(self) -> list[int]:
        order = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            if self.left[v] is not None:
                stack.append(self.left[v])
                stack.append(self.right[v])
        order.reverse()
        return order

    def edges(self) -> Iterator[tuple[int, int]]:
        """Tree edges as (child, parent)."""
        for v, p in self.parent.items():
            if p is not None:
                yield v, p

    # -- sampling -----------------------------------------------------------

    def sample_leaf(self, rng) -> int:
        """Walk down from the root, picking each child with probability
        proportional to its leaf count; the result is uniform over leaves."""
        v = self.root
        left, count = self.left, self.leaf_count
        while left[v] is not None:
            lv = left[v]
            if rng.random() * count[v] < count[lv]:
                v = lv
            else:
                v = self.right[v]
        return v

    # -- mutation -------------------------------------------------------------

    def _replace_child(self, p: int | None, old: int, new: int) -> None:
        if p is None:
            self.root = new
        elif self.left[p] == old:
            self.left[p] = new
        else:
            self.right[p] = new
        self.parent[new] = p

    def _bump_counts(self, v: int | None, delta: int) -> None:
        while v is not None:
            self.leaf_count[v] += delta
            v = self.parent[v]

    def insert_pair(self, at_leaf: int) -> tuple[int, int]:
        """Replace ``at_leaf`` by a fresh internal node whose children are
        ``at_leaf`` and a fresh leaf.  Returns ``(new_leaf, new_internal)``."""
        if at_leaf not in self.parent or not self.is_leaf(at_leaf):
            raise DomainError(f"{at_leaf} is not a leaf of this tree")
        p = self.parent[at_leaf]
        w = self._new_node()
        x = self._new_node(parent=w)
        self._replace_child(p, at_leaf, w)
        self.left[w] = at_leaf
        self.right[w] = x
        self.parent[at_leaf] = w
        self.leaf_count[w] = 2
        self._bump_counts(p, 1)
        return x, w

    def remove_pair(self, leaf: int, heights: dict[int, int] | None = None) -> tuple[int, int]:
        """Delete a deepest leaf and its parent, promoting the sibling.

        ``leaf`` is spliced out itself when it is among the deepest leaves;
        otherwise the leftmost deepest leaf goes.  Returns the removed
        ``(leaf, internal)``.  A ``heights`` map (as from ``heights()``), if
        passed, is used for the search and kept up to date.
        """
        if leaf not in self.parent or not self.is_leaf(leaf):
            raise DomainError(f"{leaf} is not a leaf of this tree")
        if self.num_leaves < 3:
            raise DomainError("cannot shrink a tree with fewer than 3 leaves")
        if heights is None:
            heights = self.heights()
        if self.depth(leaf) == heights[self.root]:
            victim = leaf
        else:
            victim = self.root
            while self.left[victim] is not None:
                a, b = self.left[victim], self.right[victim]
                victim = a if heights[a] >= heights[b] else b
        p = self.parent[victim]
        s = self.sibling(victim)
        g = self.parent[p]
        self._replace_child(g, p, s)
        for v in (victim, p):
            del self.parent[v], self.left[v], self.right[v], self.leaf_count[v]
            heights.pop(v, None)
        self._bump_counts(g, -1)
        v = g
        while v is not None:
            h = 1 + max(heights[self.left[v]], heights[self.right[v]])
            if heights[v] == h:
                break
            heights[v] = h
            v = self.parent[v]
        return victim, p

    def rotate_right(self, x: int) -> None:
        y = self.left[x]
        if y is None or self.left[y] is None:
            raise DomainError("right rotation needs an internal left child")
        b = self.right[y]
        self._replace_child(self.parent[x], x, y)
        self.left[x] = b
        self.parent[b] = x
        self.right[y] = x
        self.parent[x] = y
        self.leaf_count[x] = self.leaf_count[b] + self.leaf_count[self.right[x]]
        self.leaf_count[y] = self.leaf_count[self.left[y]] + self.leaf_count[x]

    def rotate_left(self, x: int) -> None:
        y = self.right[x]
        if y is None or self.left[y] is None:
            raise DomainError("left rotation needs an internal right child")
        b = self.left[y]
        self._replace_child(self.parent[x], x, y)
        self.right[x] = b
        self.parent[b] = x
        self.left[y] = x
        self.parent[x] = y
        self.leaf_count[x] = self.leaf_count[self.left[x]] + self.leaf_count[b]
        self.leaf_count[y] = self.leaf_count[x] + self.leaf_count[self.right[y]]

    def _rebuild(self, v: int) -> int:
        """Day-Stout-Warren on the subtree at ``v``; returns rotations used."""
        p = self.parent[v]
        on_left = p is not None and self.left[p] == v

        def top():
            if p is None:
                return self.root
            return self.left[p] if on_left else self.right[p]

        rotations = 0
        # tree -> vine: a right spine whose left children are all leaves
        cur = v
        while self.left[cur] is not None:
            lv = self.left[cur]
            if self.left[lv] is not None:
                self.rotate_right(cur)
                rotations += 1
                cur = lv
            else:
                cur = self.right[cur]

        def compress(count):
            nonlocal rotations
            scanner = top()
            for _ in range(count):
                child = self.right[scanner]
                self.rotate_left(scanner)
                rotations += 1
                scanner = self.right[child]

        size = self.leaf_count[top()] - 1
        extra = size + 1 - (1 << int(math.log2(size + 1)))
        compress(extra)
        size -= extra
        while size > 1:
            size //= 2
            compress(size)
        return rotations

    def rebalance(self) -> int:
        """Rotate until all leaf depths lie within one level of each other.

        Subtrees that already fit the target depth window are left alone;
        the rest are rebuilt top-down.  Returns the number of rotations.
        """
        n = self.num_leaves
        if n <= 2:
            return 0
        hi = math.ceil(math.log2(n))
        lo = hi - 1
        shallow: dict[int, int] = {}
        deep: dict[int, int] = {}
        for v in self._postorder():
            if self.left[v] is None:
                shallow[v] = deep[v] = 0
            else:
                a, b = self.left[v], self.right[v]
                shallow[v] = 1 + min(shallow[a], shallow[b])
                deep[v] = 1 + max(deep[a], deep[b])

        def fits(count, d):
            return (1 << max(lo - d, 0)) <= count and (hi >= d and count <= (1 << (hi - d)))

        rotations = 0
        stack = [(self.root, 0)]
        while stack:
            v, d = stack.pop()
            if self.left[v] is None or (d + shallow[v] >= lo and d + deep[v] <= hi):
                continue
            a, b = self.left[v], self.right[v]
            if fits(self.leaf_count[a], d + 1) and fits(self.leaf_count[b], d + 1):
                stack.append((a, d + 1))
                stack.append((b, d + 1))
            else:
                rotations += self._rebuild(v)
        return rotations

    # -- decomposition ------------------------------------------------------

    def maximal_occupied_subtrees(self, occupied_leaves: Iterable[int]) -> list[frozenset[int]]:
        """Node sets of the maximal subtrees whose leaves all lie in the given
        leaf set, ordered left to right."""
        s = set(occupied_leaves)
        for v in s:
            if v not in self.parent or not self.is_leaf(v):
                raise DomainError(f"{v} is not a leaf of this tree")
        if not s:
            return []
        full = {}
        for v in self._postorder():
            if self.left[v] is None:
                full[v] = v in s
            else:
                full[v] = full[self.left[v]] and full[self.right[v]]
        roots = [
            v for v in self.inorder()
            if full[v] and (self.parent[v] is None or not full[self.parent[v]])
        ]
        return [self.subtree(r) for r in roots]

    # -- auditing -------------------------------------------------------------

    def audit(self) -> None:
        """Raise AssertionError if any structural invariant is broken."""
        assert self.root is not None and self.parent[self.root] is None
        seen = 0
        n_leaves = 0
        stack = [self.root]
        while stack:
            v = stack.pop()
            seen += 1
            a, b = self.left[v], self.right[v]
            assert (a is None) == (b is None), f"node {v} has one child"
            if a is None:
                n_leaves += 1
                assert self.leaf_count[v] == 1, f"leaf {v} has count {self.leaf_count[v]}"
            else:
                assert self.parent[a] == v and self.parent[b] == v, f"bad parent link under {v}"
                assert self.leaf_count[v] == self.leaf_count[a] + self.leaf_count[b], (
                    f"leaf count mismatch at {v}"
                )
                stack.extend((a, b))
        assert seen == len(self.parent), "unreachable nodes present"
        assert seen == 2 * n_leaves - 1, "leaves != internals + 1"


def build_complete(num_leaves: int) -> VirtualTree:
    """Complete binary tree; ids follow heap order (root 0, children 2i+1, 2i+2)."""
    if num_leaves < 2 or num_leaves & (num_leaves - 1):
        raise DomainError(f"num_leaves must be a power of two >= 2, got {num_leaves}")
    tree = VirtualTree()
    total = 2 * num_leaves - 1
    for i in range(total):
        tree._new_node(parent=None if i == 0 else (i - 1) // 2)
    tree.root = 0
    for i in range(num_leaves - 1):
        tree.left[i] = 2 * i + 1
        tree.right[i] = 2 * i + 2
    for i in reversed(range(num_leaves - 1)):
        tree.leaf_count[i] = tree.leaf_count[2 * i + 1] + tree.leaf_count[2 * i + 2]
    return tree
