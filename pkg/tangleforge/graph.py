"""Finite simple graphs on vertices 0..n-1.

Vertex sets are plain ``int`` bitmasks: bit ``v`` is set iff vertex ``v`` is a
member. Input order is the canonical vertex order used by every tie-break.
"""
import logging
from functools import cached_property, lru_cache

import networkx as nx

from tangleforge.errors import GraphParseError

logger = logging.getLogger(__name__)


def vset(vertices):
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def members(mask):
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


def size(mask):
    return mask.bit_count()


def lowest(mask):
    return (mask & -mask).bit_length() - 1


def set_key(mask):
    return members(mask)


class Graph:
    def __init__(self, n, edges, labels=None):
        if n < 0:
            raise GraphParseError("negative vertex count")
        seen = set()
        for u, v in edges:
            if u == v:
                raise GraphParseError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphParseError(f"endpoint of {u}-{v} outside 0..{n - 1}")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise GraphParseError(f"duplicate edge {e[0]}-{e[1]}")
            seen.add(e)
        if labels is not None and len(labels) != n:
            raise GraphParseError(f"{len(labels)} labels for {n} vertices")
        self.n = n
        self.edges = tuple(sorted(seen))
        self.labels = tuple(labels) if labels is not None else None
        adj = [0] * n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.adj = tuple(adj)
        self.full = (1 << n) - 1

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self.edges)})"

    @classmethod
    def from_networkx(cls, g, labels=None):
        nodes = list(g.nodes)
        index = {v: i for i, v in enumerate(nodes)}
        edges = [(index[u], index[v]) for u, v in g.edges]
        if labels is None and any(not isinstance(v, int) for v in nodes):
            labels = [str(v) for v in nodes]
        return cls(len(nodes), edges, labels)

    @cached_property
    def nx_graph(self):
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def label(self, v):
        return self.labels[v] if self.labels else str(v)

    def has_edge(self, u, v):
        return bool(self.adj[u] >> v & 1)

    def neighbourhood(self, mask):
        """N(X): vertices outside ``mask`` adjacent to it."""
        out = 0
        rest = mask
        while rest:
            low = rest & -rest
            out |= self.adj[low.bit_length() - 1]
            rest ^= low
        return out & ~mask

    def crossing_edge(self, left, right):
        rest = left
        while rest:
            low = rest & -rest
            u = low.bit_length() - 1
            hit = self.adj[u] & right
            if hit:
                return (u, lowest(hit))
            rest ^= low
        return None

    def covered_by(self, masks):
        """True iff the induced subgraphs on ``masks`` together are the whole graph."""
        union = 0
        for m in masks:
            union |= m
        if union != self.full:
            return False
        for u, v in self.edges:
            both = (1 << u) | (1 << v)
            if not any(m & both == both for m in masks):
                return False
        return True

    def is_connected_set(self, mask):
        if not mask:
            return False
        reach = mask & -mask
        frontier = reach
        while frontier:
            grown = self.neighbourhood(frontier) & mask & ~reach
            reach |= grown
            frontier = grown
        return reach == mask

    def induced(self, mask):
        """The subgraph on ``mask``, relabelled 0..|mask|-1 in vertex order."""
        keep = members(mask)
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Graph(len(keep), edges, [self.label(v) for v in keep])


@lru_cache(maxsize=65536)
def components(g, deleted=0, tight_only=False):
    """Components of G - deleted as bitmasks, ordered by smallest vertex.

    With ``tight_only`` keep only components K with N(K) == deleted.
    """
    rest = members(g.full & ~deleted)
    found = [vset(c) for c in nx.connected_components(g.nx_graph.subgraph(rest))]
    if tight_only:
        found = [c for c in found if g.neighbourhood(c) == deleted]
    return tuple(sorted(found, key=lowest))


def load_graph(source, fmt=None):
    text = source.decode("ascii") if isinstance(source, bytes) else source
    if fmt is None:
        fmt = "graph6" if _looks_like_graph6(text) else "edgelist"
    if fmt == "graph6":
        return _load_graph6(text)
    if fmt != "edgelist":
        raise GraphParseError(f"unknown format {fmt}")
    return _load_edgelist(text)


def _looks_like_graph6(text):
    first = text.strip().split("\n", 1)[0].strip()
    return first.startswith(">>graph6<<") or (bool(first) and " " not in first and not first.isdigit())


def _load_graph6(text):
    line = text.strip().split("\n", 1)[0].strip()
    try:
        g = nx.from_graph6_bytes(line.encode("ascii"))
    except (nx.NetworkXError, ValueError) as exc:
        raise GraphParseError(f"bad graph6 string: {exc}", line=1) from exc
    return Graph(g.number_of_nodes(), list(g.edges))


def _load_edgelist(text):
    lines = text.split("\n")
    header = None
    edges = []
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise GraphParseError(f"expected two non-negative integers, got {line!r}", line=number)
        a, b = int(parts[0]), int(parts[1])
        if header is None:
            header = (a, b)
            continue
        n = header[0]
        if a == b:
            raise GraphParseError(f"self-loop at {a}", line=number)
        if a >= n or b >= n:
            raise GraphParseError(f"endpoint {max(a, b)} >= n={n}", line=number)
        e = (min(a, b), max(a, b))
        if e in edges:
            raise GraphParseError(f"duplicate edge {a} {b}", line=number)
        edges.append(e)
    if header is None:
        raise GraphParseError("missing header 'n m'", line=1)
    if len(edges) != header[1]:
        raise GraphParseError(f"header announces {header[1]} edges, found {len(edges)}", line=1)
    logger.debug("loaded edge list with %d vertices and %d edges", header[0], len(edges))
    return Graph(header[0], edges)


def emit_edgelist(g):
    rows = [f"{g.n} {len(g.edges)}"] + [f"{u} {v}" for u, v in g.edges]
    return "\n".join(rows) + "\n"


def emit_graph6(g):
    return nx.to_graph6_bytes(g.nx_graph, header=False).decode("ascii").strip()
