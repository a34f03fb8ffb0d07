"""Synchronous matching-mixing rounds.

One round: every leaf flips a fair coin (active/passive); every active leaf
probes a leaf by a weighted descent from the root and sends it an exchange
request; a passive leaf that receives exactly one request accepts it; each
accepted pair swaps its internal slots.  All coins and probes are drawn
before any swap, and the accepted pairs are disjoint, so the order in which
swaps are applied does not matter.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import DomainError
from .pairing import Pairing
from .vtree import VirtualTree


@dataclass(frozen=True)
class MixRoundStats:
    actives: int
    requests_sent: int
    accepted: int
    swaps: int
    messages: int = 0  # token hops spent on probes (sum of probe depths)


@dataclass(frozen=True)
class RoundDraws:
    """Everything random about one round, drawn up front."""

    active: frozenset[int]
    probes: dict[int, int]  # active leaf -> probed leaf


def draw_round(tree: VirtualTree, rng) -> RoundDraws:
    leaves = tree.leaves()
    active = [l for l in leaves if rng.random() < 0.5]
    probes = {a: tree.sample_leaf(rng) for a in active}
    return RoundDraws(frozenset(active), probes)


def accepted_pairs(draws: RoundDraws) -> list[tuple[int, int]]:
    """(active, passive) pairs that agree to swap.

    Self-probes and probes that land on active leaves are rejected, as are
    all requests to a passive leaf that receives more than one.
    """
    hits = Counter(draws.probes.values())
    return [
        (a, t)
        for a, t in draws.probes.items()
        if t != a and t not in draws.active and hits[t] == 1
    ]


def mix_round(tree: VirtualTree, pairing: Pairing, rng, debug: bool = False) -> MixRoundStats:
    draws = draw_round(tree, rng)
    pairs = accepted_pairs(draws)
    for a, t in pairs:
        pairing.swap(a, t)
    if debug:
        pairing.audit(tree)
    depths = tree.depths()
    return MixRoundStats(
        actives=len(draws.active),
        requests_sent=len(draws.probes),
        accepted=len(pairs),
        swaps=len(pairs),
        messages=sum(depths[t] for t in draws.probes.values()),
    )


def run_mixing(tree: VirtualTree, pairing: Pairing, rounds: int, rng) -> list[MixRoundStats]:
    if rounds < 0:
        raise DomainError(f"rounds must be >= 0, got {rounds}")
    return [mix_round(tree, pairing, rng) for _ in range(rounds)]


def matching_distance(p: Pairing, q: Pairing) -> int:
    """Number of leaves paired with different internal nodes; the two root
    copies count as the same node."""
    if set(p) != set(q):
        raise DomainError("pairings are over different leaf sets")
    return sum(1 for leaf in p if p.internal_node(leaf) != q.internal_node(leaf))
