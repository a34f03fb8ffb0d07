"""Leaf-to-internal pairings and their contraction into a physical graph.

A tree with n leaves has n - 1 internal nodes; the root is counted twice
(a primary slot and a duplicate slot) so that leaves and internal slots are
equinumerous.  Physical node P manages one leaf l and the slot paired with
it, and the physical graph joins P and Q whenever a virtual node managed by
P is adjacent in the tree to one managed by Q.
"""

from __future__ import annotations

import enum
from typing import Iterator, Mapping, NamedTuple

from .errors import DomainError
from .graph import PhysicalGraph
from .vtree import VirtualTree


class SlotCopy(enum.Enum):
    PRIMARY = "primary"
    ROOT_DUPLICATE = "root_duplicate"


class InternalSlot(NamedTuple):
    node: int
    copy: SlotCopy = SlotCopy.PRIMARY

    @property
    def is_duplicate(self) -> bool:
        return self.copy is SlotCopy.ROOT_DUPLICATE


class RootMode(enum.Enum):
    """How the duplicated root slot takes part in contraction.

    DETACHED: the duplicate slot carries no tree edges of its own; its
    manager is linked to the rest only through its leaf.
    SHARED: the duplicate carries every root adjacency (edges to both root
    children), with no edge between the two root copies.
    """

    DETACHED = "detached"
    SHARED = "shared"


class Pairing:
    """Bijection leaf -> InternalSlot, mutable through ``swap`` and the
    join/leave helpers."""

    def __init__(self, mapping: Mapping[int, InternalSlot] = ()):
        self._slot: dict[int, InternalSlot] = {}
        self._leaf: dict[InternalSlot, int] = {}
        for leaf, slot in dict(mapping).items():
            self.assign(leaf, slot)

    def __getitem__(self, leaf: int) -> InternalSlot:
        try:
            return self._slot[leaf]
        except KeyError:
            raise DomainError(f"leaf {leaf} is not in the pairing") from None

    def __contains__(self, leaf) -> bool:
        return leaf in self._slot

    def __len__(self) -> int:
        return len(self._slot)

    def __iter__(self) -> Iterator[int]:
        return iter(self._slot)

    def __eq__(self, other) -> bool:
        return isinstance(other, Pairing) and self._slot == other._slot

    def __repr__(self) -> str:
        return f"Pairing({self._slot!r})"

    def items(self):
        return self._slot.items()

    def leaf_of(self, slot: InternalSlot) -> int:
        return self._leaf[slot]

    def copy(self) -> "Pairing":
        other = Pairing()
        other._slot = dict(self._slot)
        other._leaf = dict(self._leaf)
        return other

    def swap(self, leaf_a: int, leaf_b: int) -> None:
        """Exchange the slots of two leaves in place."""
        sa, sb = self[leaf_a], self[leaf_b]
        self._slot[leaf_a], self._slot[leaf_b] = sb, sa
        self._leaf[sb], self._leaf[sa] = leaf_a, leaf_b

    def assign(self, leaf: int, slot: InternalSlot) -> None:
        if leaf in self._slot:
            raise DomainError(f"leaf {leaf} is already paired")
        if slot in self._leaf:
            raise DomainError(f"slot {slot} is already taken")
        self._slot[leaf] = slot
        self._leaf[slot] = leaf

    def unassign(self, leaf: int) -> InternalSlot:
        slot = self._slot.pop(leaf)
        del self._leaf[slot]
        return slot

    def duplicate_slot(self) -> InternalSlot:
        for slot in self._leaf:
            if slot.is_duplicate:
                return slot
        raise DomainError("pairing has no root duplicate slot")

    def rehome_root(self, new_root: int) -> None:
        """Move the duplicate slot onto ``new_root`` after a root rotation."""
        old = self.duplicate_slot()
        if old.node == new_root:
            return
        leaf = self._leaf.pop(old)
        new = InternalSlot(new_root, SlotCopy.ROOT_DUPLICATE)
        self._leaf[new] = leaf
        self._slot[leaf] = new

    def internal_node(self, leaf: int) -> int:
        """Paired internal node with the two root copies identified."""
        return self[leaf].node

    def matching_key(self, leaves) -> tuple[int, ...]:
        """Hashable key of the matching with root copies identified."""
        return tuple(self._slot[l].node for l in leaves)

    def audit(self, tree: VirtualTree) -> None:
        """Raise DomainError unless this is a valid pairing for ``tree``."""
        leaves = set(tree.leaves())
        if set(self._slot) != leaves:
            raise DomainError("pairing domain differs from the tree's leaves")
        expected = {InternalSlot(v) for v in tree.internals()}
        expected.add(InternalSlot(tree.root, SlotCopy.ROOT_DUPLICATE))
        if set(self._leaf) != expected or len(self._leaf) != len(self._slot):
            raise DomainError("pairing image differs from the tree's internal slots")


def all_slots(tree: VirtualTree) -> list[InternalSlot]:
    """Internal slots in in-order, with the root duplicate last."""
    slots = [InternalSlot(v) for v in tree.internals()]
    slots.append(InternalSlot(tree.root, SlotCopy.ROOT_DUPLICATE))
    return slots


def canonical_pairing(tree: VirtualTree) -> Pairing:
    """The i-th leaf (in-order) gets the i-th internal slot (in-order, root
    duplicate last).  Deterministic and far from uniform."""
    return Pairing(zip(tree.leaves(), all_slots(tree)))


def random_pairing(tree: VirtualTree, rng) -> Pairing:
    slots = all_slots(tree)
    rng.shuffle(slots)
    return Pairing(zip(tree.leaves(), slots))


def managers(tree: VirtualTree, pairing: Pairing, owner: Mapping[int, int] | None = None):
    """Map every virtual node to its physical manager.

    Returns ``(manager, duplicate_manager)``; physical ids default to leaf
    ids when no ``owner`` (leaf -> physical id) mapping is given.
    """
    manager: dict[int, int] = {}
    dup_manager = None
    for leaf, slot in pairing.items():
        p = leaf if owner is None else owner[leaf]
        manager[leaf] = p
        if slot.copy is SlotCopy.PRIMARY:
            manager[slot.node] = p
        else:
            dup_manager = p
    return manager, dup_manager


def contract(
    tree: VirtualTree,
    pairing: Pairing,
    owner: Mapping[int, int] | None = None,
    root_mode: RootMode | str = RootMode.DETACHED,
    check: bool = True,
) -> PhysicalGraph:
    """Contract every (leaf, paired slot) into one physical vertex."""
    root_mode = RootMode(root_mode)
    if check:
        pairing.audit(tree)
    manager, dup_manager = managers(tree, pairing, owner)
    root = tree.root
    edges = []
    for child, parent in tree.edges():
        a = manager[child]
        edges.append((a, manager[parent]))
        if parent == root and root_mode is RootMode.SHARED:
            edges.append((a, dup_manager))
    return PhysicalGraph((manager[l] for l in pairing), edges)
