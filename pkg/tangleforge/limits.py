"""Finite truncations of infinite example graphs and the proxies computed on them.

Each family maps a level n to a finite graph G_n with a marked boundary; G_n
sits inside G_{n+1} and the boundary separates it from the part added later.
"""
import logging
from dataclasses import dataclass, field

import networkx as nx

from tangleforge import config
from tangleforge.errors import InvalidArgument, Refusal
from tangleforge.families import explicit, find_member, pprime, tk, union
from tangleforge.graph import Graph, members, size, vset
from tangleforge.orientations import Orientation, find_f_tangles, inconsistent_pair, is_f_tangle
from tangleforge.separations import Separation, enumerate_separations, is_separation, orientation_pair

logger = logging.getLogger(__name__)

STATED = "stated"
DERIVED = "derived"


@dataclass(frozen=True)
class Truncation:
    name: str
    n: int
    graph: Graph
    boundary: int
    start: int
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FamilyDescriptor:
    name: str
    generator: object
    minimum: int
    defaults: dict
    declared: dict
    sequence: object = None
    core: object = None

    def params(self, overrides=None):
        out = dict(self.defaults)
        out.update(overrides or {})
        return out


def grid(n, rows=3):
    g = Graph.from_networkx(nx.grid_2d_graph(n, rows))
    return g, vset(range((n - 1) * rows, n * rows)), vset(range(rows))


def ray_clique(n, clique=5):
    """Path 0..n with a clique on {0} + clique-1 further vertices."""
    extra = list(range(n + 1, n + clique))
    edges = [(i, i + 1) for i in range(n)]
    edges += [(u, v) for i, u in enumerate([0] + extra) for v in ([0] + extra)[i + 1:]]
    labels = [str(i) for i in range(n + 1)] + [f"k{j}" for j in range(1, clique)]
    return Graph(n + clique, edges, labels), 1 << n, 1


def edgeless(n):
    return Graph(n, []), 0, 0


def example_5_4(n, height=4):
    """Columns 0..n-1 of ``height`` vertices; two vertices are adjacent iff their columns differ by at most one."""
    def index(i, j):
        return j * height + i

    edges = set()
    for j in range(n):
        for i in range(height):
            for j2 in (j, j + 1):
                if j2 >= n:
                    continue
                for i2 in range(height):
                    u, v = index(i, j), index(i2, j2)
                    if u != v:
                        edges.add((min(u, v), max(u, v)))
    labels = [f"v{i + 1}_{j}" for j in range(n) for i in range(height)]
    column = vset(range((n - 1) * height, n * height))
    return Graph(n * height, sorted(edges), labels), column, vset(range(height))


def _ray_sequence(t):
    """alpha(i, i+1) = ({0..i+1}, {i..n} + K)."""
    n = t.n
    clique = t.graph.full & ~vset(range(n + 1))
    return [Separation(vset(range(i + 2)), vset(range(i, n + 1)) | clique | 1) for i in range(n - 1)]


def _column_sequence(t):
    """(B_j, A_j): columns <= j against columns >= j."""
    height = t.params["height"]
    return [Separation(vset(range((j + 1) * height)), vset(range(j * height, t.n * height)))
            for j in range(t.n)]


def _ray_core(t):
    return t.graph.full & ~vset(range(t.n + 1))


FAMILY_MAP = {
    "grid": FamilyDescriptor("grid", grid, 1, {"rows": 3},
                             {"ends": (1, STATED), "degree": ("rows", STATED), "dominating": (0, DERIVED)}),
    "ray_clique": FamilyDescriptor("ray_clique", ray_clique, 2, {"clique": 5},
                                   {"ends": (1, STATED), "degree": (1, DERIVED), "dominating": (0, DERIVED)},
                                   sequence=_ray_sequence, core=_ray_core),
    "edgeless": FamilyDescriptor("edgeless", edgeless, 1, {},
                                 {"ends": (0, STATED), "degree": (0, DERIVED), "dominating": (0, DERIVED)}),
    "example_5_4": FamilyDescriptor("example_5_4", example_5_4, 1, {"height": 4},
                                    {"ends": (1, STATED), "degree": (4, DERIVED), "dominating": (0, DERIVED)},
                                    sequence=_column_sequence),
}


def family(name):
    try:
        return FAMILY_MAP[name]
    except KeyError:
        raise InvalidArgument(f"unknown family {name}; choose from {sorted(FAMILY_MAP)}") from None


def truncate(fam, n, **overrides):
    fam = family(fam) if isinstance(fam, str) else fam
    if n < fam.minimum:
        raise InvalidArgument(f"{fam.name} needs n >= {fam.minimum}, got {n}")
    params = fam.params(overrides)
    g, boundary, start = fam.generator(n, **params)
    return Truncation(fam.name, n, g, boundary, start, params)


def declared_degree(fam, params):
    value, _ = fam.declared["degree"]
    return params[value] if isinstance(value, str) else value


@dataclass(frozen=True)
class ProxyOrientation:
    k: int
    oriented: int
    skipped: int
    consistent: bool
    avoids_tk: bool


@dataclass(frozen=True)
class TruncationReport:
    name: str
    n: int
    paths: int
    declared_degree: int
    passed: bool
    proxy: ProxyOrientation = None


def disjoint_paths(g, start, boundary):
    """Most vertex-disjoint paths from ``start`` to ``boundary``."""
    h = nx.Graph(g.nx_graph)
    h.add_edges_from(("source", v) for v in members(start))
    h.add_edges_from((v, "sink") for v in members(boundary))
    return nx.algorithms.connectivity.local_node_connectivity(h, "source", "sink")


def proxy_orientation(t, k):
    """Orient each separation with exactly one strict side avoiding the boundary toward the other side."""
    g, boundary = t.graph, t.boundary
    chosen = set()
    skipped = 0
    for m in enumerate_separations(g, k):
        r = m.reverse()
        small_free, big_free = not m.small & boundary, not m.big & boundary
        if small_free and not big_free:
            chosen.add(m)
        elif big_free and not small_free:
            chosen.add(r)
        else:
            skipped += 1
    return ProxyOrientation(k, len(chosen), skipped, inconsistent_pair(chosen) is None,
                            find_member(g, chosen, tk(k)) is None)


def end_degree_proxy(fam, n, k=None, **overrides):
    fam = family(fam) if isinstance(fam, str) else fam
    t = truncate(fam, n, **overrides)
    if not nx.is_connected(t.graph.nx_graph):
        raise InvalidArgument(f"{fam.name} truncation at n={n} is disconnected")
    paths = disjoint_paths(t.graph, t.start, t.boundary)
    degree = declared_degree(fam, t.params)
    proxy = proxy_orientation(t, k) if k is not None else None
    logger.debug("%s n=%d: %d disjoint paths, declared degree %d", fam.name, n, paths, degree)
    return TruncationReport(fam.name, n, paths, degree, paths == degree, proxy)


@dataclass(frozen=True)
class SequenceReport:
    length: int
    orders: tuple
    valid: bool
    increasing: bool
    intersection: int
    core: int
    core_persists: bool
    empty: bool
    failure: str = ""


def natural_sequence(fam, t):
    if fam.sequence is None:
        raise InvalidArgument(f"{fam.name} has no labelled sequence")
    return fam.sequence(t)


def sequence_report(fam, n, sequence=None, **overrides):
    """Validity, strict increase and the intersection of strict big sides over a prefix."""
    fam = family(fam) if isinstance(fam, str) else fam
    t = truncate(fam, n, **overrides)
    g = t.graph
    seps = natural_sequence(fam, t) if sequence is None else list(sequence)
    core = fam.core(t) if fam.core is not None else 0
    for i, s in enumerate(seps):
        if not is_separation(g, s):
            return SequenceReport(len(seps), (), False, False, 0, core, False, False,
                                  f"label {i} is not a separation")
    increasing = all(x.lt(y) for x, y in zip(seps, seps[1:]))
    meet = g.full
    for s in seps:
        meet &= s.big
    report = SequenceReport(len(seps), tuple(s.order for s in seps), True, increasing, meet, core,
                            bool(core) and core & ~meet == 0, meet == 0,
                            "" if increasing else "sequence is not strictly increasing")
    logger.debug("%s n=%d: |meet|=%d increasing=%s", fam.name, n, size(meet), increasing)
    return report


def edgeless_tangle_count(m, k=1):
    if k != 1:
        raise InvalidArgument("edgeless tangle counts are defined for k = 1 only")
    return len(find_f_tangles(edgeless(m)[0], k, tk(k), limit=None))


@dataclass(frozen=True)
class ChainReport:
    n: int
    members: int
    labels: int
    avoiding: tuple
    first_violation: dict
    boundary_ward: bool


def block_orientation(system, block):
    """Each member of ``system`` oriented with no vertex of ``block`` on its strict small side."""
    return Orientation(system, frozenset(next(x for x in orientation_pair(m) if not x.small & block)
                                         for m in system))


def example_5_4_family(g, k, system, labels):
    """Singletons {(A_j, B_j)} for ``labels`` given as (B_j, A_j), the {(V, X)} singletons, and P'_k."""
    full_small = [{Separation(g.full, m.b if m.a == g.full else m.a)}
                  for m in system if g.full in (m.a, m.b)]
    return union(explicit(k, [{s.reverse()} for s in labels] + full_small, name="example_5_4"), pprime(k))


def example_5_4_chain(n, k=5, bound=config.CHAIN_COLUMN_BOUND):
    """Orient S_k(G_n) toward each block of two consecutive columns and test it against the family.

    The block next to the boundary is the only one whose orientation avoids the family; every
    other block orientation contains (A_j, B_j) for the first label j past the block.
    """
    if n < 2:
        raise InvalidArgument(f"the column chain needs n >= 2, got {n}")
    if n > bound:
        raise Refusal(f"the column chain is limited to {bound} columns, got {n}", status="bound",
                      details={"n": n, "bound": bound})
    t = truncate("example_5_4", n)
    g = t.graph
    height = t.params["height"]
    system = enumerate_separations(g, k)
    labels = _column_sequence(t)[:n - 1]
    forbidden = example_5_4_family(g, k, system, labels)
    avoiding = []
    first_violation = {}
    for j in range(n - 1):
        tau = block_orientation(system, vset(range(j * height, (j + 2) * height)))
        if is_f_tangle(tau, forbidden):
            avoiding.append(j)
            continue
        hit = next((i for i, s in enumerate(labels) if s.reverse() in tau), None)
        first_violation[j] = hit
    boundary_ward = avoiding == [n - 2]
    logger.debug("column chain n=%d: %d members, avoiding blocks %s", n, len(system), avoiding)
    return ChainReport(n, len(system), len(labels), tuple(avoiding), first_violation, boundary_ward)
