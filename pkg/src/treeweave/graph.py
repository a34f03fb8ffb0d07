"""Simple undirected graphs, node boundaries and exact node expansion."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import CapacityError, DomainError

DEFAULT_MAX_VERTICES = 20


class PhysicalGraph:
    """Read-only simple undirected graph with sorted neighbour tuples."""

    def __init__(self, vertices: Iterable[int], edges: Iterable[tuple[int, int]] = ()):
        nbrs: dict[int, set[int]] = {v: set() for v in vertices}
        for u, v in edges:
            if u == v:
                continue
            if u not in nbrs or v not in nbrs:
                raise DomainError(f"edge ({u}, {v}) uses an unknown vertex")
            nbrs[u].add(v)
            nbrs[v].add(u)
        self.vertices: tuple[int, ...] = tuple(sorted(nbrs))
        self.adj: dict[int, tuple[int, ...]] = {v: tuple(sorted(nbrs[v])) for v in self.vertices}
        self._arrays = None

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self.adj

    def __eq__(self, other) -> bool:
        return isinstance(other, PhysicalGraph) and self.adj == other.adj

    def __repr__(self) -> str:
        return f"PhysicalGraph(|V|={len(self)}, |E|={self.num_edges})"

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def max_degree(self) -> int:
        return max((len(n) for n in self.adj.values()), default=0)

    @property
    def num_edges(self) -> int:
        return sum(len(n) for n in self.adj.values()) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in self.vertices for v in self.adj[u] if u < v]

    def relabel(self, mapping) -> "PhysicalGraph":
        return PhysicalGraph(
            (mapping[v] for v in self.vertices),
            ((mapping[u], mapping[v]) for u, v in self.edges()),
        )

    def dump(self) -> str:
        """One ``u v`` line per edge (u < v), sorted numerically."""
        return "".join(f"{u} {v}\n" for u, v in self.edges())

    @classmethod
    def parse(cls, text: str, vertices: Iterable[int] = ()) -> "PhysicalGraph":
        edges = [tuple(map(int, line.split())) for line in text.splitlines() if line.strip()]
        vs = set(vertices)
        for u, v in edges:
            vs.update((u, v))
        return cls(vs, edges)

    def arrays(self):
        """Cached (index, src, dst, degree) numpy arrays for matrix-free
        Laplacian products; ``index`` maps vertex -> position."""
        if self._arrays is None:
            import numpy as np

            index = {v: i for i, v in enumerate(self.vertices)}
            src = []
            dst = []
            for u in self.vertices:
                iu = index[u]
                for v in self.adj[u]:
                    src.append(iu)
                    dst.append(index[v])
            deg = np.array([len(self.adj[v]) for v in self.vertices], dtype=float)
            self._arrays = (index, np.array(src, dtype=np.intp), np.array(dst, dtype=np.intp), deg)
        return self._arrays


def node_boundary(graph: PhysicalGraph, subset: Iterable[int]) -> set[int]:
    s = set(subset)
    missing = s.difference(graph.adj)
    if missing:
        raise DomainError(f"vertices not in graph: {sorted(missing)}")
    out = set()
    for u in s:
        out.update(graph.adj[u])
    return out - s


def connected_components(graph: PhysicalGraph) -> list[set[int]]:
    """Components ordered by their smallest vertex."""
    seen = set()
    comps = []
    for start in graph.vertices:
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in graph.adj[u]:
                if v not in comp:
                    comp.add(v)
                    stack.append(v)
        seen |= comp
        comps.append(comp)
    return comps


def is_connected(graph: PhysicalGraph) -> bool:
    return len(graph) > 0 and len(connected_components(graph)) == 1


def tree_as_graph(tree) -> PhysicalGraph:
    return PhysicalGraph(tree.parent, tree.edges())


@dataclass(frozen=True)
class ExpansionResult:
    value: Fraction
    witness: frozenset[int]


def exact_node_expansion(graph: PhysicalGraph, max_vertices: int = DEFAULT_MAX_VERTICES) -> ExpansionResult:
    """Minimum of |dS|/|S| over nonempty S with |S| <= |V|/2.

    Walks all subsets in Gray-code order, toggling one vertex per step and
    keeping the boundary size up to date from per-vertex counts of
    neighbours inside S.  Ties go to the lexicographically smallest witness
    (as a sorted vertex tuple).
    """
    n = len(graph)
    if n > max_vertices:
        raise CapacityError(
            f"{n} vertices exceeds the exact-expansion cap of {max_vertices}; "
            "use the spectral proxy (spectral.lambda2) instead"
        )
    if n < 2:
        raise DomainError("node expansion needs at least 2 vertices")
    verts = graph.vertices
    index = {v: i for i, v in enumerate(verts)}
    nbrs = [[index[u] for u in graph.adj[v]] for v in verts]
    half = n // 2

    inside = [False] * n
    hits = [0] * n  # neighbours of each vertex that lie in S
    size = 0
    boundary = 0
    best_b, best_s, best_mask = None, None, 0
    mask = 0

    for step in range(1, 1 << n):
        i = (step & -step).bit_length() - 1
        if inside[i]:
            inside[i] = False
            size -= 1
            mask ^= 1 << i
            if hits[i]:
                boundary += 1
            for j in nbrs[i]:
                hits[j] -= 1
                if hits[j] == 0 and not inside[j]:
                    boundary -= 1
        else:
            inside[i] = True
            size += 1
            mask ^= 1 << i
            if hits[i]:
                boundary -= 1
            for j in nbrs[i]:
                if hits[j] == 0 and not inside[j]:
                    boundary += 1
                hits[j] += 1
        if size > half:
            continue
        if best_b is None:
            best_b, best_s, best_mask = boundary, size, mask
            continue
        lhs = boundary * best_s
        rhs = best_b * size
        if lhs < rhs or (lhs == rhs and _mask_key(mask, n) < _mask_key(best_mask, n)):
            best_b, best_s, best_mask = boundary, size, mask

    witness = frozenset(verts[i] for i in range(n) if best_mask >> i & 1)
    return ExpansionResult(Fraction(best_b, best_s), witness)


def _mask_key(mask: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if mask >> i & 1)
