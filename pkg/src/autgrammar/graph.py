"""Simple undirected graphs on vertex set {1, ..., m}.

Vertices are 1-based everywhere; edges are unordered pairs stored with the
smaller endpoint first.  Graph values are immutable after construction, so
they are safe to share across threads.
"""

from __future__ import annotations

from typing import Iterable


class GraphError(Exception):
    """Base class for graph construction and query errors."""


class GraphParseError(GraphError):
    """Base class for edge-list text format errors."""


class MalformedLineError(GraphParseError):
    pass


class SelfLoopError(GraphParseError):
    pass


class DuplicateEdgeError(GraphParseError):
    pass


class VertexRangeError(GraphError):
    pass


class DisconnectedGraphError(GraphError):
    """Raised by pipeline entry points that require a connected graph."""


class Graph:
    """Immutable simple graph on vertices 1..m.

    Adjacency is kept both as a set of normalized pairs and as per-vertex
    sorted neighbor tuples; the neighbor tuples are the canonical iteration
    order for everything built on top.
    """

    __slots__ = ("vertex_count", "edges", "neighbors")

    def __init__(self, vertex_count: int, edges: Iterable[tuple[int, int]]):
        if vertex_count < 1:
            raise VertexRangeError(f"vertex count must be positive, got {vertex_count}")
        normalized: set[tuple[int, int]] = set()
        for u, v in edges:
            if not (1 <= u <= vertex_count) or not (1 <= v <= vertex_count):
                raise VertexRangeError(f"edge ({u},{v}) out of range 1..{vertex_count}")
            if u == v:
                raise SelfLoopError(f"self-loop at vertex {u}")
            pair = (u, v) if u < v else (v, u)
            if pair in normalized:
                raise DuplicateEdgeError(f"duplicate edge {{{pair[0]},{pair[1]}}}")
            normalized.add(pair)
        object.__setattr__(self, "vertex_count", vertex_count)
        object.__setattr__(self, "edges", frozenset(normalized))
        adj: dict[int, list[int]] = {v: [] for v in range(1, vertex_count + 1)}
        for u, v in normalized:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(
            self, "neighbors", {v: tuple(sorted(ns)) for v, ns in adj.items()}
        )

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.vertex_count == other.vertex_count
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.vertex_count, self.edges))

    def __repr__(self):
        return f"Graph(vertex_count={self.vertex_count}, edges={sorted(self.edges)})"

    @property
    def vertices(self) -> range:
        return range(1, self.vertex_count + 1)

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges or (v, u) in self.edges

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return len(self.neighbors[v])

    def _check_vertex(self, v: int) -> None:
        if not (1 <= v <= self.vertex_count):
            raise VertexRangeError(f"vertex {v} out of range 1..{self.vertex_count}")


def parse_graph(text: str) -> Graph:
    """Parse edge-list text: a header line "m k" followed by k lines "u v"."""
    lines = [ln for ln in text.split("\n") if ln.strip() != ""]
    if not lines:
        raise MalformedLineError("empty input")
    header = lines[0].split(" ")
    if len(header) != 2:
        raise MalformedLineError(f"header must be 'm k', got {lines[0]!r}")
    try:
        m, k = int(header[0]), int(header[1])
    except ValueError:
        raise MalformedLineError(f"non-integer header {lines[0]!r}") from None
    if m < 1:
        raise MalformedLineError(f"vertex count must be positive, got {m}")
    if k < 0:
        raise MalformedLineError(f"edge count must be non-negative, got {k}")
    if len(lines) - 1 != k:
        raise MalformedLineError(f"expected {k} edge lines, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        toks = ln.split(" ")
        if len(toks) != 2:
            raise MalformedLineError(f"edge line must be 'u v', got {ln!r}")
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise MalformedLineError(f"non-integer edge line {ln!r}") from None
        if not (1 <= u <= m) or not (1 <= v <= m):
            raise VertexRangeError(f"edge ({u},{v}) out of range 1..{m}")
        edges.append((u, v))
    return Graph(m, edges)


def format_graph(g: Graph) -> str:
    """Serialize to normalized edge-list text (round-trips with parse_graph)."""
    lines = [f"{g.vertex_count} {len(g.edges)}"]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"


def closed_neighborhood(g: Graph, s: Iterable[int]) -> tuple[int, ...]:
    """N(s) together with s itself, as a sorted tuple."""
    result: set[int] = set()
    for v in s:
        g._check_vertex(v)
        result.add(v)
        result.update(g.neighbors[v])
    return tuple(sorted(result))


def induced_subgraph(g: Graph, s: Iterable[int]) -> frozenset[tuple[int, int]]:
    """Edges of g with both endpoints in s, keeping the original labels."""
    sset = set()
    for v in s:
        g._check_vertex(v)
        sset.add(v)
    return frozenset(e for e in g.edges if e[0] in sset and e[1] in sset)


def is_connected(g: Graph) -> bool:
    """True iff g has a single connected component (K1 counts as connected)."""
    seen = {1}
    stack = [1]
    while stack:
        v = stack.pop()
        for u in g.neighbors[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == g.vertex_count


def max_degree(g: Graph) -> int:
    return max(len(g.neighbors[v]) for v in g.vertices)


def require_connected(g: Graph) -> None:
    if not is_connected(g):
        raise DisconnectedGraphError("graph not connected")
