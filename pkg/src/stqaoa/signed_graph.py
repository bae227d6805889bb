"""Signed graphs, cuts, balance and directed spanning trees.

Vertices are integers ``0 .. n-1``. An edge ``(u, v, s)`` with ``s = -1`` is
satisfied when its endpoints sit on opposite sides of a bipartition, with
``s = +1`` when they sit on the same side. Plain MAXCUT is the all ``-1`` case.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

__all__ = [
    "SignedGraph",
    "Cut",
    "DirectedSpanningTree",
    "cut_value",
    "is_balanced",
    "balanced_cut_from_tree",
    "tree_from_cut",
    "bfs_tree",
    "random_spanning_tree",
    "random_regular_graph",
    "read_graph",
    "write_graph",
    "parse_graph",
    "format_graph",
]


@dataclass(frozen=True)
class SignedGraph:
    """Simple undirected graph with a +-1 signature on every edge.

    Edge order and orientation are kept as given so that the text format
    round-trips exactly.
    """

    n_vertices: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        edges = tuple((int(u), int(v), int(s)) for u, v, s in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.n_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        seen = set()
        for u, v, s in edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n_vertices}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if s not in (1, -1):
                raise ValueError(f"edge ({u}, {v}) has sign {s}, expected +1 or -1")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex, the sorted ``(neighbour, sign)`` pairs."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n_vertices)]
        for u, v, s in self.edges:
            adj[u].append((v, s))
            adj[v].append((u, s))
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def _sign_lookup(self) -> dict[tuple[int, int], int]:
        table = {}
        for u, v, s in self.edges:
            table[(u, v)] = s
            table[(v, u)] = s
        return table

    def sign(self, u: int, v: int) -> int:
        """Signature of edge {u, v}; KeyError if absent."""
        return self._sign_lookup[(u, v)]

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._sign_lookup

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=int)
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def components(self, edges: Iterable[tuple[int, int, int]] | None = None) -> list[list[int]]:
        """Connected components (sorted vertex lists, ordered by smallest vertex).

        ``edges`` restricts the search to a subgraph on the same vertex set.
        """
        ds = DisjointSet(range(self.n_vertices))
        for u, v, _ in self.edges if edges is None else edges:
            ds.merge(u, v)
        comps = [sorted(c) for c in ds.subsets()]
        return sorted(comps, key=lambda c: c[0])

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(u, v, sign)`` as integer arrays, for vectorised evaluation."""
        if not self.edges:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, empty
        arr = np.asarray(self.edges, dtype=np.int64)
        return arr[:, 0], arr[:, 1], arr[:, 2]


@dataclass(frozen=True)
class Cut:
    """A bipartition as one bit per vertex (0 = side X, 1 = side Y)."""

    assignment: tuple[int, ...]
    value: int

    @classmethod
    def of(cls, g: SignedGraph, z: Sequence[int] | str) -> "Cut":
        bits = _as_bits(z)
        return cls(bits, cut_value(g, bits))

    @property
    def bits(self) -> np.ndarray:
        return np.asarray(self.assignment, dtype=np.int8)

    def complement(self) -> "Cut":
        return Cut(tuple(1 - b for b in self.assignment), self.value)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.assignment)


@dataclass(frozen=True)
class DirectedSpanningTree:
    """Rooted spanning tree with per-edge signs.

    ``edge_order`` holds ``(parent, child, sign)`` triples in an order where
    each vertex is attached before any edge leaving it.
    """

    root: int
    parent: dict[int, tuple[int, int]] = field(hash=False)
    edge_order: tuple[tuple[int, int, int], ...]

    @property
    def n_vertices(self) -> int:
        return len(self.edge_order) + 1

    @cached_property
    def depth(self) -> dict[int, int]:
        depth = {self.root: 0}
        for p, c, _ in self.edge_order:
            depth[c] = depth[p] + 1
        return depth

    @cached_property
    def edge_index(self) -> dict[int, int]:
        """Child vertex -> position of its incoming edge in ``edge_order``."""
        return {c: q for q, (_, c, _) in enumerate(self.edge_order)}

    def undirected_edges(self) -> set[tuple[int, int]]:
        return {(min(p, c), max(p, c)) for p, c, _ in self.edge_order}

    def validate(self, g: SignedGraph) -> None:
        """Raise ValueError unless this is a signed spanning tree of ``g``."""
        n = g.n_vertices
        if not 0 <= self.root < n:
            raise ValueError(f"root {self.root} not a vertex")
        if len(self.edge_order) != n - 1:
            raise ValueError(f"tree has {len(self.edge_order)} edges, graph needs {n - 1}")
        if self.root in self.parent:
            raise ValueError("root must not have a parent")
        placed = {self.root}
        for p, c, s in self.edge_order:
            if p not in placed:
                raise ValueError(f"edge {p}->{c} listed before its parent is attached")
            if c in placed:
                raise ValueError(f"vertex {c} attached twice")
            if not g.has_edge(p, c):
                raise ValueError(f"tree edge {p}->{c} is not a graph edge")
            if g.sign(p, c) != s:
                raise ValueError(f"tree edge {p}->{c} has sign {s}, graph says {g.sign(p, c)}")
            if self.parent.get(c) != (p, s):
                raise ValueError(f"parent map disagrees with edge {p}->{c}")
            placed.add(c)
        if len(placed) != n or len(self.parent) != n - 1:
            raise ValueError("tree does not span the graph")

    def path(self, i: int, j: int) -> list[int]:
        """Indices into ``edge_order`` of the edges on the tree path i <-> j."""
        depth = self.depth
        out = []
        while i != j:
            if depth[i] >= depth[j]:
                out.append(self.edge_index[i])
                i = self.parent[i][0]
            else:
                out.append(self.edge_index[j])
                j = self.parent[j][0]
        return out


def _as_bits(z) -> tuple[int, ...]:
    if isinstance(z, Cut):
        return z.assignment
    if isinstance(z, str):
        return tuple(int(ch) for ch in z)
    return tuple(int(b) for b in z)


def cut_value(g: SignedGraph, z) -> int:
    """Number of edges of ``g`` satisfied by the bit assignment ``z``."""
    bits = _as_bits(z)
    if len(bits) != g.n_vertices:
        raise ValueError(f"assignment has length {len(bits)}, graph has {g.n_vertices} vertices")
    total = 0
    for u, v, s in g.edges:
        differ = bits[u] != bits[v]
        total += differ if s == -1 else not differ
    return int(total)


def bfs_tree(
    g: SignedGraph,
    root: int = 0,
    edges: Iterable[tuple[int, int, int]] | None = None,
) -> DirectedSpanningTree:
    """BFS spanning tree of ``g`` (or of the subgraph on ``edges``).

    Children are visited in ascending vertex id. Raises ValueError if the
    (sub)graph is not connected.
    """
    if edges is None:
        adj = g.adjacency
    else:
        lists: list[list[tuple[int, int]]] = [[] for _ in range(g.n_vertices)]
        for u, v, s in edges:
            lists[u].append((v, s))
            lists[v].append((u, s))
        adj = [sorted(a) for a in lists]
    parent: dict[int, tuple[int, int]] = {}
    order = []
    seen = {root}
    queue = deque([root])
    while queue:
        p = queue.popleft()
        for c, s in adj[p]:
            if c not in seen:
                seen.add(c)
                parent[c] = (p, s)
                order.append((p, c, s))
                queue.append(c)
    if len(seen) != g.n_vertices:
        raise ValueError("graph is not connected; no spanning tree")
    return DirectedSpanningTree(root, parent, tuple(order))


def _forest_assignment(g: SignedGraph) -> list[int]:
    bits = [-1] * g.n_vertices
    for start in range(g.n_vertices):
        if bits[start] >= 0:
            continue
        bits[start] = 0
        queue = deque([start])
        while queue:
            p = queue.popleft()
            for c, s in g.adjacency[p]:
                if bits[c] < 0:
                    bits[c] = bits[p] if s == 1 else 1 - bits[p]
                    queue.append(c)
    return bits


def is_balanced(g: SignedGraph) -> Cut | None:
    """A cut satisfying every edge, or None if the signed graph is frustrated.

    Propagates an assignment along a spanning forest and then checks the
    remaining edges.
    """
    bits = _forest_assignment(g)
    cut = Cut.of(g, bits)
    return cut if cut.value == g.n_edges else None


def balanced_cut_from_tree(g: SignedGraph, t: DirectedSpanningTree) -> Cut:
    """Cut induced by walking ``t`` from its root (root on side 0)."""
    t.validate(g)
    bits = [0] * g.n_vertices
    for p, c, s in t.edge_order:
        bits[c] = bits[p] if s == 1 else 1 - bits[p]
    return Cut.of(g, bits)


def tree_from_cut(g: SignedGraph, z, root: int = 0) -> tuple[Cut, DirectedSpanningTree]:
    """Spanning tree of the subgraph of edges satisfied by ``z``.

    When the satisfied subgraph is disconnected, components other than the
    one holding ``root`` are flipped one at a time (smallest vertex first).
    Every edge leaving a component is unsatisfied, so each flip gains at
    least one edge and the loop terminates with a connected subgraph.
    """
    if not g.is_connected():
        raise ValueError("graph is disconnected")
    bits = list(_as_bits(z))
    if len(bits) != g.n_vertices:
        raise ValueError(f"assignment has length {len(bits)}, graph has {g.n_vertices} vertices")
    while True:
        satisfied = [e for e in g.edges if (bits[e[0]] != bits[e[1]]) == (e[2] == -1)]
        comps = g.components(satisfied)
        if len(comps) == 1:
            break
        other = next(c for c in comps if root not in c)
        for v in other:
            bits[v] = 1 - bits[v]
    return Cut.of(g, bits), bfs_tree(g, root, satisfied)


def random_spanning_tree(g: SignedGraph, seed=None) -> DirectedSpanningTree:
    """Random spanning tree by randomised Kruskal, random root, BFS order.

    ``seed`` is anything ``numpy.random.default_rng`` accepts, including a
    Generator (which is then advanced).
    """
    rng = np.random.default_rng(seed)
    if not g.is_connected():
        raise ValueError("graph is disconnected")
    ds = DisjointSet(range(g.n_vertices))
    chosen = []
    for k in rng.permutation(g.n_edges):
        u, v, s = g.edges[k]
        if ds.merge(u, v):
            chosen.append((u, v, s))
            if len(chosen) == g.n_vertices - 1:
                break
    root = int(rng.integers(g.n_vertices))
    return bfs_tree(g, root, chosen)


def random_regular_graph(n: int, d: int, sign: int = -1, seed=None) -> SignedGraph:
    """Uniform simple d-regular graph via the configuration model.

    Stubs are paired by a random shuffle; any self-loop or repeated pair
    rejects the whole pairing and the draw restarts.
    """
    if (n * d) % 2:
        raise ValueError(f"n*d must be even (n={n}, d={d})")
    if not 0 <= d < n:
        raise ValueError(f"need 0 <= d < n (n={n}, d={d})")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    while True:
        pairs = rng.permutation(stubs).reshape(-1, 2)
        pairs.sort(axis=1)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        keys = pairs[:, 0] * n + pairs[:, 1]
        if len(np.unique(keys)) != len(keys):
            continue
        order = np.argsort(keys)
        return SignedGraph(n, tuple((int(u), int(v), sign) for u, v in pairs[order]))


def format_graph(g: SignedGraph) -> str:
    lines = [f"{g.n_vertices} {g.n_edges}"]
    lines += [f"{u} {v} {s:+d}" for u, v, s in g.edges]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> SignedGraph:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows or len(rows[0]) != 2:
        raise ValueError("first line must be 'n m'")
    n, m = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != m:
        raise ValueError(f"header says {m} edges, found {len(body)}")
    edges = []
    for row in body:
        if len(row) != 3:
            raise ValueError(f"bad edge line: {' '.join(row)!r}")
        edges.append((int(row[0]), int(row[1]), int(row[2])))
    return SignedGraph(n, tuple(edges))


def write_graph(g: SignedGraph, path) -> None:
    Path(path).write_text(format_graph(g))


def read_graph(path) -> SignedGraph:
    return parse_graph(Path(path).read_text())
