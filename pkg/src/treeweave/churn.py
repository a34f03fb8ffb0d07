"""Churn scenario engine.

Rounds are grouped in cycles (default length 7): round 1 joins, round 2
leaves, round 3 rebalances and mixes, the remaining rounds only mix.  lambda_2
of the physical graph is recorded at the end of every round.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import asdict, dataclass

from .errors import DomainError, ScenarioError
from .graph import PhysicalGraph
from .mixing import mix_round
from .pairing import InternalSlot, Pairing, RootMode, contract, random_pairing
from .seeding import run_seed
from .spectral import lambda2
from .vtree import VirtualTree, build_complete


class Phase(str, enum.Enum):
    JOIN = "Join"
    LEAVE = "Leave"
    BALANCE_MIX = "BalanceMix"
    MIX = "Mix"


class Adversary(str, enum.Enum):
    HIGHEST_H = "highest_h"
    RANDOM = "random"
    LOWEST_H = "lowest_h"


@dataclass(frozen=True)
class ScenarioConfig:
    initial_leaves: int = 512
    total_rounds: int = 100
    churn_fraction: float = 0.0
    cycle_length: int = 7
    mix_rounds_per_balance_round: int = 1
    seed: int = 0
    runs: int = 1
    adversary: str = Adversary.HIGHEST_H.value
    root_mode: str = RootMode.DETACHED.value

    def validate(self) -> None:
        n = self.initial_leaves
        if n < 2 or n & (n - 1):
            raise DomainError(f"initial_leaves must be a power of two >= 2, got {n}")
        if self.total_rounds < 1:
            raise DomainError("total_rounds must be >= 1")
        if not 0.0 <= self.churn_fraction <= 1.0:
            raise DomainError("churn_fraction must lie in [0, 1]")
        if self.cycle_length < 3:
            raise DomainError("cycle_length must be >= 3 (join, leave, balance)")
        if self.mix_rounds_per_balance_round < 0:
            raise DomainError("mix_rounds_per_balance_round must be >= 0")
        if self.runs < 1:
            raise DomainError("runs must be >= 1")
        Adversary(self.adversary)
        RootMode(self.root_mode)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RoundTrace:
    run: int
    round: int
    phase: str
    population: int
    lambda2: float
    swaps: int
    disconnected: bool


def round_sig(x: float, digits: int = 9) -> float:
    """Round to the precision written to trace files, so a trace read back
    from CSV equals the in-memory one."""
    return float(f"{x:.{digits}g}")


def churn_count(fraction: float, initial_population: int) -> int:
    """Nodes joining (or leaving) per cycle: the fraction of the initial
    population, rounded down."""
    # the epsilon keeps e.g. 0.3 * 10 from flooring to 2
    return int(math.floor(fraction * initial_population + 1e-9))


class SimulationState:
    """Tree, pairing and the physical-node ownership map.

    Physical node P owns exactly one leaf (``leaf_of[P]``) and, through the
    pairing, exactly one internal slot.  Physical ids are never reused.
    """

    def __init__(self, tree: VirtualTree, pairing: Pairing, owner: dict[int, int]):
        self.tree = tree
        self.pairing = pairing
        self.owner = dict(owner)  # leaf -> physical id
        self.leaf_of = {p: l for l, p in self.owner.items()}
        self.initial_population = len(self.owner)
        self.round_index = 0
        self._next_phys = max(self.leaf_of, default=-1) + 1

    @classmethod
    def start(cls, num_leaves: int, rng, pairing: Pairing | None = None) -> "SimulationState":
        tree = build_complete(num_leaves)
        if pairing is None:
            pairing = random_pairing(tree, rng)
        owner = {leaf: i for i, leaf in enumerate(tree.leaves())}
        return cls(tree, pairing, owner)

    @property
    def population(self) -> int:
        return len(self.leaf_of)

    def physical_nodes(self) -> list[int]:
        return sorted(self.leaf_of)

    def slot_of(self, p: int) -> InternalSlot:
        return self.pairing[self.leaf_of[p]]

    def owner_of_slot(self, slot: InternalSlot) -> int:
        return self.owner[self.pairing.leaf_of(slot)]

    def new_physical_id(self) -> int:
        p = self._next_phys
        self._next_phys += 1
        return p

    def graph(self, root_mode=RootMode.DETACHED) -> PhysicalGraph:
        return contract(self.tree, self.pairing, owner=self.owner, root_mode=root_mode, check=False)

    def audit(self) -> None:
        self.tree.audit()
        self.pairing.audit(self.tree)
        assert set(self.owner) == set(self.pairing), "owned leaves differ from paired leaves"
        assert len(self.leaf_of) == len(self.owner), "a physical node owns two leaves"
        for p, leaf in self.leaf_of.items():
            assert self.owner[leaf] == p
            assert self.owner_of_slot(self.pairing[leaf]) == p
        assert self.population == self.tree.num_leaves == len(self.pairing)


def join_phase(state: SimulationState, fraction: float, rng) -> int:
    """Each newcomer picks a uniformly random leaf u, splits it and owns the
    new leaf together with the new internal node above u.

    Joins in one round are concurrent, so contacts are drawn from the leaves
    present when the round began (a snapshot of the tree); a newcomer never
    bootstraps from another newcomer of the same round.
    """
    joined = churn_count(fraction, state.initial_population)
    snapshot = state.tree.copy() if joined else None
    for _ in range(joined):
        u = snapshot.sample_leaf(rng)
        leaf, internal = state.tree.insert_pair(u)
        p = state.new_physical_id()
        state.owner[leaf] = p
        state.leaf_of[p] = leaf
        state.pairing.assign(leaf, InternalSlot(internal))
    return joined


def h_metric(state: SimulationState, p: int, heights: dict[int, int] | None = None) -> int:
    """Height of the smallest subtree holding both of p's virtual nodes."""
    if p not in state.leaf_of:
        raise DomainError(f"unknown physical node {p}")
    leaf = state.leaf_of[p]
    top = state.tree.lca(leaf, state.pairing[leaf].node)
    if heights is not None:
        return heights[top]
    return state.tree.height(top)


def depart(state: SimulationState, p: int, heights: dict[int, int] | None = None) -> tuple[int, ...]:
    """Remove physical node ``p`` and repair ownership.

    The tree loses a deepest leaf and its parent.  The owner of that leaf
    takes over p's leaf and the owner of that internal node takes over p's
    slot.  Returns the surviving physical nodes whose holdings changed.
    """
    tree, pairing = state.tree, state.pairing
    if state.population <= 2:
        raise ScenarioError("cannot shrink below 2 physical nodes")
    p_leaf = state.leaf_of[p]
    p_slot = pairing[p_leaf]
    gone_leaf, gone_internal = tree.remove_pair(p_leaf, heights)
    gone_slot = InternalSlot(gone_internal)
    a = state.owner[gone_leaf]
    b_leaf = pairing.leaf_of(gone_slot)
    b = state.owner[b_leaf]
    a_slot = pairing[gone_leaf]

    new = {}
    if a != p:
        new[a] = (p_leaf, p_slot if a == b else a_slot)
    if b != p and b != a:
        new[b] = (b_leaf, p_slot)

    for leaf in {p_leaf, gone_leaf, b_leaf}:
        if leaf in pairing:
            pairing.unassign(leaf)
    del state.owner[gone_leaf]
    del state.leaf_of[p]
    if p_leaf in state.owner:
        del state.owner[p_leaf]
    for q, (leaf, slot) in new.items():
        pairing.assign(leaf, slot)
        state.owner[leaf] = q
        state.leaf_of[q] = leaf
    return tuple(new)


def leave_phase(
    state: SimulationState,
    fraction: float,
    adversary: str = Adversary.HIGHEST_H.value,
    rng=None,
) -> int:
    """Greedy sequential adversary: score every node, remove the worst, repair,
    rescore.  ``highest_h`` (ties to the smallest id) is the default."""
    adversary = Adversary(adversary)
    leaving = churn_count(fraction, state.initial_population)
    if leaving == 0:
        return 0
    if state.population - leaving < 2:
        raise ScenarioError(
            f"{leaving} departures would leave {state.population - leaving} physical nodes"
        )
    if adversary is Adversary.RANDOM and rng is None:
        raise DomainError("the random adversary needs an rng")
    tree = state.tree
    top = {
        p: tree.lca(leaf, state.pairing[leaf].node) for p, leaf in state.leaf_of.items()
    }
    heights = tree.heights()
    for _ in range(leaving):
        if adversary is Adversary.RANDOM:
            victim = rng.choice(state.physical_nodes())
        else:
            if adversary is Adversary.HIGHEST_H:
                victim = min(top, key=lambda q: (-heights[top[q]], q))
            else:
                victim = min(top, key=lambda q: (heights[top[q]], q))
        changed = depart(state, victim, heights)
        del top[victim]
        for q in changed:
            leaf = state.leaf_of[q]
            top[q] = tree.lca(leaf, state.pairing[leaf].node)
    return leaving


def balance_phase(state: SimulationState) -> int:
    rotations = state.tree.rebalance()
    state.pairing.rehome_root(state.tree.root)
    return rotations


def phase_of(round_number: int, cycle_length: int) -> Phase:
    """Phase of a 1-based round number."""
    pos = (round_number - 1) % cycle_length
    if pos == 0:
        return Phase.JOIN
    if pos == 1:
        return Phase.LEAVE
    if pos == 2:
        return Phase.BALANCE_MIX
    return Phase.MIX


def run_scenario(config: ScenarioConfig, run: int = 0, debug: bool = False) -> list[RoundTrace]:
    """One run of the churn scenario, seeded by ``run_seed(config.seed, run)``."""
    config.validate()
    rng = random.Random(run_seed(config.seed, run))
    state = SimulationState.start(config.initial_leaves, rng)
    traces = []
    for r in range(1, config.total_rounds + 1):
        state.round_index = r
        phase = phase_of(r, config.cycle_length)
        swaps = 0
        if phase is Phase.JOIN:
            join_phase(state, config.churn_fraction, rng)
        elif phase is Phase.LEAVE:
            leave_phase(state, config.churn_fraction, config.adversary, rng)
        elif phase is Phase.BALANCE_MIX:
            balance_phase(state)
            for _ in range(config.mix_rounds_per_balance_round):
                swaps += mix_round(state.tree, state.pairing, rng).swaps
        else:
            swaps = mix_round(state.tree, state.pairing, rng).swaps
        if debug:
            state.audit()
        report = lambda2(state.graph(config.root_mode))
        traces.append(
            RoundTrace(
                run=run,
                round=r,
                phase=phase.value,
                population=state.population,
                lambda2=round_sig(report.lambda2),
                swaps=swaps,
                disconnected=not report.connected,
            )
        )
    return traces


def run_batch(config: ScenarioConfig, jobs: int = 1) -> list[RoundTrace]:
    """All ``config.runs`` runs, merged in (run, round) order.  Each run has
    its own seed, so the result does not depend on ``jobs``."""
    config.validate()
    runs = range(config.runs)
    if jobs <= 1 or config.runs == 1:
        per_run = [run_scenario(config, r) for r in runs]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_run = list(pool.map(run_scenario, [config] * config.runs, runs))
    return [t for traces in per_run for t in traces]
