"""Finite sink-truncated graphs and rotor mechanisms.

A graph here is a connected simple graph together with a designated origin
and a nonempty set of absorbing sink vertices.  Sinks stand in for "escaped
to infinity" on a truncation of an infinite graph; particles reaching a sink
stay there.  One relaxation of simplicity is allowed: parallel edges are
permitted when one endpoint is a sink, because redirecting all boundary
edges of a lattice ball into a single shared sink necessarily produces them.
The live (non-sink) part of the graph is always strictly simple.

Vertices are dense integer ids 0..n-1; every graph carries a parallel tuple
of unique string labels for file IO and reporting.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import IO, Iterable

import numpy as np

from .errors import GraphInvalid, InvalidParameter
from .rng import philox_generator


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph with ordered adjacency lists.

    adjacency[x] is the ordered tuple of neighbors of x; the order is the
    construction order and is what the default rotor mechanism follows.
    """

    adjacency: tuple[tuple[int, ...], ...]
    origin: int
    sinks: frozenset[int]
    labels: tuple[str, ...]
    name: str = field(default="", compare=False)

    @property
    def num_vertices(self) -> int:
        return len(self.adjacency)

    def describe(self) -> str:
        if self.name:
            return self.name
        return f"graph(V={self.num_vertices}, sinks={len(self.sinks)})"

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @cached_property
    def is_sink(self) -> np.ndarray:
        mask = np.zeros(self.num_vertices, dtype=bool)
        mask[list(self.sinks)] = True
        return mask

    @cached_property
    def adj_indptr(self) -> np.ndarray:
        """CSR row pointer over the flattened adjacency (sinks included)."""
        return np.concatenate(([0], np.cumsum(self.degrees)))

    @cached_property
    def adj_flat(self) -> np.ndarray:
        return np.array([y for adj in self.adjacency for y in adj], dtype=np.int64)

    @cached_property
    def label_to_id(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def degree(self, x: int) -> int:
        return len(self.adjacency[x])


@dataclass(frozen=True)
class RotorMechanism:
    """Cyclic ordering of each non-sink vertex's incident edges.

    order[x] is a permutation of adjacency[x] (as a multiset); the rotor at x
    steps through it cyclically, so advancing deg(x) times is the identity.
    Sinks have empty orders.
    """

    order: tuple[tuple[int, ...], ...]
    name: str = field(default="custom", compare=False)

    def describe(self) -> str:
        return self.name

    @cached_property
    def indptr(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum([len(o) for o in self.order])))

    @cached_property
    def flat(self) -> np.ndarray:
        return np.array([y for o in self.order for y in o], dtype=np.int64)

    def target(self, x: int, i: int) -> int:
        """Target vertex of the edge at mechanism position i of vertex x."""
        return self.order[x][i]


def check_graph(g: Graph) -> None:
    """Validate every structural invariant; raise GraphInvalid on the first failure.

    Checks: dense ids, labels unique, origin/sink sanity, no self-loops,
    live-pair simplicity, symmetric adjacency (with multiplicity), and
    connectivity.  Connectivity already implies that every vertex reaches a
    sink without passing another sink first (truncate any sink-bound path at
    its first sink), which is what experiment termination rests on.
    """
    n = g.num_vertices
    if n < 2:
        raise GraphInvalid("graph needs at least an origin and a sink")
    if len(g.labels) != n:
        raise GraphInvalid("labels length does not match vertex count")
    if len(set(g.labels)) != n:
        raise GraphInvalid("vertex labels are not unique")
    if not (0 <= g.origin < n):
        raise GraphInvalid(f"origin id {g.origin} out of range")
    if g.origin in g.sinks:
        raise GraphInvalid("origin must not be a sink")
    if not g.sinks:
        raise GraphInvalid("sink set is empty")
    for s in g.sinks:
        if not (0 <= s < n):
            raise GraphInvalid(f"sink id {s} out of range")

    sink = g.is_sink
    for x, adj in enumerate(g.adjacency):
        if not adj:
            raise GraphInvalid(f"vertex {g.labels[x]} has no edges")
        counts = Counter(adj)
        for y, c in counts.items():
            if not (0 <= y < n):
                raise GraphInvalid(f"neighbor id {y} out of range at {g.labels[x]}")
            if y == x:
                raise GraphInvalid(f"self-loop at vertex {g.labels[x]}")
            if c > 1 and not (sink[x] or sink[y]):
                raise GraphInvalid(
                    f"duplicate edge between non-sink vertices {g.labels[x]} and {g.labels[y]}"
                )

    # symmetry with multiplicity
    for x, adj in enumerate(g.adjacency):
        cx = Counter(adj)
        for y, c in cx.items():
            if Counter(g.adjacency[y])[x] != c:
                raise GraphInvalid(
                    f"asymmetric adjacency between {g.labels[x]} and {g.labels[y]}"
                )

    # connectivity of the whole graph
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for y in g.adjacency[x]:
            if not seen[y]:
                seen[y] = True
                queue.append(y)
    if not all(seen):
        missing = next(g.labels[i] for i, s in enumerate(seen) if not s)
        raise GraphInvalid(f"graph is disconnected (vertex {missing} unreachable)")


def _graph_from_edges(edges, origin, sinks, labels, name="") -> Graph:
    """Assemble adjacency by appending both directions of each edge in sequence."""
    adj: list[list[int]] = [[] for _ in labels]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    g = Graph(
        adjacency=tuple(tuple(a) for a in adj),
        origin=origin,
        sinks=frozenset(sinks),
        labels=tuple(labels),
        name=name,
    )
    check_graph(g)
    return g


def build_path(k: int) -> Graph:
    """Path on k vertices: origin at one end, the single sink at the other."""
    if k < 2:
        raise InvalidParameter(f"build_path needs k >= 2, got {k}")
    edges = [(i, i + 1) for i in range(k - 1)]
    return _graph_from_edges(edges, 0, {k - 1}, [str(i) for i in range(k)], name=f"path({k})")


def build_lattice_ball(d: int, radius: int) -> Graph:
    """L1 ball of Z^d with every boundary-leaving edge redirected to one shared sink.

    All lattice points with L1 norm <= radius are live vertices; each edge
    that would leave the ball becomes an edge to the shared sink, so every
    live vertex keeps its full lattice degree 2d (boundary vertices may hold
    several parallel sink edges).
    """
    if d < 1:
        raise InvalidParameter(f"build_lattice_ball needs d >= 1, got {d}")
    if radius < 1:
        raise InvalidParameter(f"build_lattice_ball needs radius >= 1, got {radius}")

    points = [p for p in product(range(-radius, radius + 1), repeat=d)
              if sum(abs(c) for c in p) <= radius]
    points.sort(key=lambda p: (sum(abs(c) for c in p), p))
    index = {p: i for i, p in enumerate(points)}
    sink = len(points)

    directions = []
    for axis in range(d):
        for sign in (1, -1):
            directions.append(tuple(sign if a == axis else 0 for a in range(d)))

    edges = []
    for p in points:
        i = index[p]
        for dvec in directions:
            q = tuple(a + b for a, b in zip(p, dvec))
            j = index.get(q)
            if j is None:
                edges.append((i, sink))
            elif j > i:
                edges.append((i, j))

    labels = [",".join(str(c) for c in p) for p in points] + ["sink"]
    return _graph_from_edges(
        edges, index[tuple([0] * d)], {sink}, labels, name=f"lattice(d={d}, r={radius})"
    )


def build_bary_tree(b: int, depth: int) -> Graph:
    """Complete b-ary tree rooted at the origin; every depth-level leaf is its own sink."""
    if b < 2:
        raise InvalidParameter(f"build_bary_tree needs b >= 2, got {b}")
    if depth < 1:
        raise InvalidParameter(f"build_bary_tree needs depth >= 1, got {depth}")

    # breadth-first ids: level l occupies a contiguous block
    level_start = [0]
    for lvl in range(depth + 1):
        level_start.append(level_start[-1] + b**lvl)
    n = level_start[-1]

    edges = []
    for lvl in range(depth):
        for k in range(b**lvl):
            parent = level_start[lvl] + k
            for c in range(b):
                child = level_start[lvl + 1] + k * b + c
                edges.append((parent, child))

    sinks = set(range(level_start[depth], n))
    return _graph_from_edges(
        edges, 0, sinks, [str(i) for i in range(n)], name=f"tree(b={b}, depth={depth})"
    )


def _normalize_label(value) -> str:
    return value if isinstance(value, str) else str(value)


def load_edge_list(source: str | IO[str] | Iterable[str], origin, sinks) -> Graph:
    """Parse whitespace-separated "u v" lines into a validated Graph.

    Vertex labels are arbitrary whitespace-free tokens, compacted to dense
    0-based ids in first-appearance order; '#' starts a comment.  The origin
    and sinks are given by label.
    """
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = list(source)

    label_ids: dict[str, int] = {}
    labels: list[str] = []

    def intern(tok: str) -> int:
        if tok not in label_ids:
            label_ids[tok] = len(labels)
            labels.append(tok)
        return label_ids[tok]

    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 2:
            raise GraphInvalid(f"line {lineno}: expected 'u v', got {raw.strip()!r}")
        edges.append((intern(toks[0]), intern(toks[1])))

    if not edges:
        raise GraphInvalid("edge list is empty")

    sink_labels = {_normalize_label(s) for s in sinks}
    origin_label = _normalize_label(origin)
    if origin_label not in label_ids:
        raise GraphInvalid(f"origin label {origin_label!r} does not appear in the edge list")
    unknown = sink_labels - label_ids.keys()
    if unknown:
        raise GraphInvalid(f"sink labels not in the edge list: {sorted(unknown)}")

    return _graph_from_edges(
        edges, label_ids[origin_label], {label_ids[s] for s in sink_labels}, labels,
        name="edge-list",
    )


def save_edge_list(g: Graph) -> str:
    """Emit "u v" lines (by label) whose parse reproduces g's adjacency order.

    Each vertex's incident edges must appear in adjacency order, so the edge
    sequence is recovered by repeatedly emitting an edge that sits at the
    current front of both endpoints' lists.
    """
    front = [0] * g.num_vertices
    remaining = sum(g.degrees) // 2
    out = []
    while remaining:
        progressed = False
        for x in range(g.num_vertices):
            while front[x] < g.degree(x):
                y = g.adjacency[x][front[x]]
                if front[y] < g.degree(y) and g.adjacency[y][front[y]] == x:
                    out.append(f"{g.labels[x]} {g.labels[y]}")
                    front[x] += 1
                    front[y] += 1
                    remaining -= 1
                    progressed = True
                else:
                    break
        if not progressed:
            raise GraphInvalid("adjacency order is not serializable as an edge list")
    return "\n".join(out) + "\n"


def default_mechanism(g: Graph) -> RotorMechanism:
    """Mechanism whose cyclic order is each vertex's adjacency order."""
    order = tuple(() if x in g.sinks else tuple(adj) for x, adj in enumerate(g.adjacency))
    return RotorMechanism(order=order, name="default")


def shuffled_mechanism(g: Graph, seed: int) -> RotorMechanism:
    """Mechanism with a seeded uniform permutation of each vertex's edges."""
    rng = philox_generator(seed)
    order = []
    for x, adj in enumerate(g.adjacency):
        if x in g.sinks:
            order.append(())
        else:
            perm = rng.permutation(len(adj))
            order.append(tuple(adj[i] for i in perm))
    return RotorMechanism(order=tuple(order), name=f"shuffled(seed={seed})")


def check_mechanism(g: Graph, mech: RotorMechanism) -> None:
    """Validate that mech matches g: sinks empty, others permute their adjacency."""
    if len(mech.order) != g.num_vertices:
        raise GraphInvalid("mechanism length does not match vertex count")
    for x, adj in enumerate(g.adjacency):
        if x in g.sinks:
            if mech.order[x]:
                raise GraphInvalid(f"sink {g.labels[x]} must have an empty mechanism")
        elif Counter(mech.order[x]) != Counter(adj):
            raise GraphInvalid(f"mechanism at {g.labels[x]} is not a permutation of its edges")
