import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations, product

import networkx as nx

from tangleforge import config
from tangleforge.errors import NotASeparationError, Refusal, StarAxiomError
from tangleforge.graph import Graph, components, lowest, members, size, vset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Separation:
    """Oriented separation (A, B) with A and B as vertex bitmasks."""
    a: int
    b: int

    @property
    def separator(self):
        return self.a & self.b

    @property
    def order(self):
        return (self.a & self.b).bit_count()

    @property
    def small(self):
        return self.a & ~self.b

    @property
    def big(self):
        return self.b & ~self.a

    def reverse(self):
        return Separation(self.b, self.a)

    def leq(self, other):
        return self.a & ~other.a == 0 and other.b & ~self.b == 0

    def lt(self, other):
        return self != other and self.leq(other)

    def meet(self, other):
        return Separation(self.a & other.a, self.b | other.b)

    def join(self, other):
        return Separation(self.a | other.a, self.b & other.b)

    def unoriented(self):
        rev = self.reverse()
        return self if (members(self.a), members(self.b)) <= (members(rev.a), members(rev.b)) else rev

    def same_separation(self, other):
        return other == self or other == self.reverse()

    def key(self):
        return (self.order, members(self.separator), members(self.a), members(self.b))

    def as_lists(self):
        return [list(members(self.a)), list(members(self.b))]

    @classmethod
    def from_lists(cls, pair):
        return cls(vset(pair[0]), vset(pair[1]))

    def describe(self, g=None):
        name = g.label if g is not None else str
        return "({%s}, {%s})" % (",".join(name(v) for v in members(self.a)),
                                 ",".join(name(v) for v in members(self.b)))


def sort_separations(seps):
    return sorted(seps, key=Separation.key)


def nested(r, s):
    return r.leq(s) or r.leq(s.reverse()) or s.leq(r) or s.reverse().leq(r)


def star_compatible(r, s):
    """Two distinct oriented separations may lie in a common star."""
    return r.leq(s.reverse())


def interior(g, elements):
    out = g.full
    for s in elements:
        out &= s.b
    return out


@dataclass(frozen=True)
class SeparationInfo:
    separation: Separation
    order: int
    proper: bool
    left_tight: bool
    right_tight: bool

    @property
    def tight(self):
        return self.left_tight and self.right_tight


def _tight_side(g, side, separator):
    if not side:
        return False
    return any(g.neighbourhood(c) == separator for c in components(g, g.full & ~side))


def make_separation(g, a, b):
    if a | b != g.full or (a | b) & ~g.full:
        raise NotASeparationError("A and B do not cover exactly the vertex set")
    sep = Separation(a, b)
    edge = g.crossing_edge(sep.small, sep.big)
    if edge is not None:
        raise NotASeparationError(f"edge {g.label(edge[0])}-{g.label(edge[1])} joins the strict sides",
                                  edge=edge)
    return SeparationInfo(
        separation=sep,
        order=sep.order,
        proper=a != g.full and b != g.full,
        left_tight=_tight_side(g, sep.small, sep.separator),
        right_tight=_tight_side(g, sep.big, sep.separator),
    )


def is_separation(g, sep):
    return sep.a | sep.b == g.full and g.crossing_edge(sep.small, sep.big) is None


class SeparationSystem:
    """S_k(G), or the restricted system S_k^sigma(G) when ``restriction`` is given."""

    def __init__(self, graph, k, members_, restriction=frozenset()):
        self.graph = graph
        self.k = k
        self.restriction = frozenset(restriction)
        self.members = tuple(sort_separations({m.unoriented() for m in members_}))
        self.index = {}
        for i, m in enumerate(self.members):
            self.index[m] = i
            self.index[m.reverse()] = i

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, sep):
        return sep in self.index

    @cached_property
    def oriented(self):
        """Both orientations of every member, small side first."""
        out = []
        for m in self.members:
            out.extend(orientation_pair(m))
        return tuple(out)

    @cached_property
    def below(self):
        """Oriented members strictly below each oriented member, other members only."""
        table = {}
        for x in self.oriented:
            ix = self.index[x]
            table[x] = tuple(y for y in self.oriented if self.index[y] != ix and y.leq(x))
        return table

    def trivial(self, r):
        return any(r.lt(m) and r.lt(m.reverse()) for m in self.members if not m.same_separation(r))


def orientation_pair(m):
    """The two orientations of ``m``, the one with the smaller small side first."""
    rev = m.reverse()
    if rev == m:
        return (m,)
    return tuple(sorted((m, rev), key=lambda s: (size(s.a), members(s.a))))


@dataclass(frozen=True)
class Comparison:
    leq: bool
    geq: bool
    nested: bool
    crossing: bool
    r_trivial_in_system: bool


def compare(r, s, system=None):
    is_nested = nested(r, s)
    return Comparison(
        leq=r.leq(s),
        geq=s.leq(r),
        nested=is_nested,
        crossing=not is_nested,
        r_trivial_in_system=system.trivial(r) if system is not None else False,
    )


@dataclass(frozen=True)
class CornerBox:
    infimum: Separation
    supremum: Separation
    corners: tuple
    order_sum_check: bool


def corner_box(r, s):
    rev = r.reverse()
    inf, sup = r.meet(s), r.join(s)
    corners = (inf, sup, rev.meet(s), rev.join(s))
    return CornerBox(inf, sup, corners, inf.order + sup.order == r.order + s.order)


def _raw_separations(g, k):
    for width in range(min(k, g.n + 1)):
        for sep_vertices in combinations(range(g.n), width):
            x = vset(sep_vertices)
            comps = components(g, x)
            if not comps:
                yield Separation(g.full, g.full)
                continue
            first, rest = comps[0], comps[1:]
            for sides in product((0, 1), repeat=len(rest)):
                left, right = first, 0
                for c, side in zip(rest, sides):
                    if side:
                        right |= c
                    else:
                        left |= c
                yield Separation(x | left, x | right).unoriented()


@dataclass(frozen=True)
class Torso:
    graph: Graph
    vertices: tuple

    def to_local(self, mask):
        return vset(i for i, v in enumerate(self.vertices) if mask >> v & 1)

    def to_global(self, mask):
        return vset(self.vertices[i] for i in members(mask))


@dataclass(frozen=True)
class StarInfo:
    elements: frozenset
    is_star: bool
    interior: int
    torso: Torso
    flags: dict


def star_violation(g, elements):
    """First pair breaking the star axiom, or None. (V,V) breaks it on its own."""
    ordered = sort_separations(elements)
    vv = Separation(g.full, g.full)
    if vv in elements:
        return (vv, vv)
    for r, s in combinations(ordered, 2):
        if not star_compatible(r, s):
            return (r, s)
    return None


def is_star(g, elements):
    return star_violation(g, elements) is None


def torso(g, elements):
    inner = interior(g, elements)
    keep = members(inner)
    index = {v: i for i, v in enumerate(keep)}
    edges = {(index[u], index[v]) for u, v in g.edges if u in index and v in index}
    for s in elements:
        for u, v in combinations(members(s.separator & inner), 2):
            edges.add((index[u], index[v]))
    return Torso(Graph(len(keep), sorted(edges), [g.label(v) for v in keep]), keep)


def star_ops(g, elements, k=None):
    elements = frozenset(elements)
    bad = star_violation(g, elements)
    if bad is not None:
        raise StarAxiomError(f"{bad[0].describe(g)} and {bad[1].describe(g)} violate the star axiom", pair=bad)
    inner = interior(g, elements)
    flags = {}
    if k is not None:
        small_orders = all(s.order < k for s in elements)
        flags["tstar"] = small_orders and len(elements) <= 3 and g.covered_by([s.a for s in elements])
        flags["uk"] = small_orders and size(inner) < k
    return StarInfo(elements, True, inner, torso(g, elements), flags)


@lru_cache(maxsize=256)
def full_system(g, k):
    return SeparationSystem(g, k, set(_raw_separations(g, k)))


def enumerate_separations(g, k, sigma=frozenset()):
    """S_k(G), or S_k^sigma(G) built from the separations of torso(sigma)."""
    sigma = frozenset(sigma)
    if not sigma:
        system = full_system(g, k)
        logger.debug("S_%d has %d separations", k, len(system))
        return system
    info = star_ops(g, sigma)
    t = info.torso
    placements = []
    for s in sort_separations(sigma):
        placements.append((s.small, s.separator))
    found = set()
    for local in full_system(t.graph, k).members:
        a0, b0 = t.to_global(local.a), t.to_global(local.b)
        options = []
        for part, anchor in placements:
            sides = []
            if anchor & ~a0 == 0:
                sides.append(0)
            if anchor & ~b0 == 0:
                sides.append(1)
            options.append(sides)
        for choice in product(*options):
            a, b = a0, b0
            for (part, _), side in zip(placements, choice):
                if side:
                    b |= part
                else:
                    a |= part
            found.add(Separation(a, b).unoriented())
    system = SeparationSystem(g, k, found, restriction=sigma)
    logger.debug("S_%d^sigma has %d separations (|sigma|=%d)", k, len(system), len(sigma))
    return system


def restricted_bound(g, k, sigma):
    """(#separations of torso(sigma) of order < k) * 2^|sigma|."""
    t = torso(g, sigma)
    return len(full_system(t.graph, k)) * 2 ** len(sigma)


@dataclass(frozen=True)
class RobustWitness:
    separation: Separation
    ell: int
    hub: int
    paths: dict
    fans: dict
    mode: str


SHARED_ENDS = "shared_ends"
DISJOINT_ENDS = "disjoint_ends"


def left_robust(g, s, ell, budget=config.DEFAULT_ROBUST_BUDGET, mode=SHARED_ENDS):
    """Witness that the small side of ``s`` is left-ell-robust, or raise Refusal.

    Refusal.status is "bound" (ell > |A|), "impossible" (every choice searched)
    or "budget" (search stopped early).
    """
    a = s.a
    if ell > size(a):
        raise Refusal(f"no hub of size {ell} inside a side of {size(a)} vertices", status="bound",
                      details={"separation": s.as_lists(), "ell": ell})
    small = s.small
    xs = members(s.separator)
    pool = small if len(xs) >= 2 else a
    if size(pool) < ell:
        raise Refusal(f"only {size(pool)} vertices can start fan paths, need {ell}", status="impossible",
                      details={"separation": s.as_lists(), "ell": ell})
    witness = _tight_component_witness(g, s, ell, mode)
    if witness is None:
        witness = _built_witness(g, s, ell, pool, mode)
    if witness is not None:
        return witness
    work = 0
    trivial = tuple((x,) for x in xs)
    for hub in combinations(members(pool), ell):
        work += 1
        if work > budget:
            raise _budget_refusal(s, ell, work)
        found = _fans_for(g, small, xs, trivial, vset(hub), ell, mode)
        if found is not None:
            return RobustWitness(s, ell, vset(hub), dict(zip(xs, trivial)), found, mode)
    for hub in combinations(members(pool), ell):
        for paths in _path_systems(g, small, xs, 0):
            work += 1
            if work > budget:
                raise _budget_refusal(s, ell, work)
            found = _fans_for(g, small, xs, paths, vset(hub), ell, mode)
            if found is not None:
                return RobustWitness(s, ell, vset(hub), dict(zip(xs, paths)), found, mode)
    if size(a) > config.ROBUST_EXHAUSTIVE_BOUND:
        logger.info("robustness search exhausted on a side of %d vertices", size(a))
    raise Refusal(f"no hub of size {ell} with fans onto every separator path", status="impossible",
                  details={"separation": s.as_lists(), "ell": ell, "work": work})


def _budget_refusal(s, ell, work):
    logger.warning("robustness search for ell=%d stopped after %d steps", ell, work)
    return Refusal(f"search budget of {work - 1} steps spent", status="budget",
                   details={"separation": s.as_lists(), "ell": ell, "work": work - 1})


def _tight_component_witness(g, s, ell, mode):
    """ell tight components of the separator in the small side give a witness with trivial paths."""
    xs = members(s.separator)
    tight = [c for c in components(g, g.full & ~s.small) if g.neighbourhood(c) == s.separator]
    if len(tight) < ell or mode != SHARED_ENDS:
        return None
    tight = tight[:ell]
    hub = vset(lowest(c) for c in tight)
    fans = {}
    for x in xs:
        fan = []
        for c in tight:
            region = g.nx_graph.subgraph(members(c | 1 << x))
            fan.append(tuple(nx.shortest_path(region, lowest(c), x)))
        fans[x] = tuple(fan)
    return RobustWitness(s, ell, hub, {x: (x,) for x in xs}, fans, mode)


def _built_witness(g, s, ell, pool, mode):
    """Hub of the pool vertices nearest to the separator paths; trivial paths first, then paths to the far end of A."""
    xs = members(s.separator)
    if not xs:
        return None
    h = g.nx_graph.subgraph(members(s.a))
    for paths in _candidate_paths(h, xs):
        near = nx.multi_source_dijkstra_path_length(h, {v for path in paths for v in path})
        ranked = sorted((near[v], v) for v in members(pool) if v in near)
        if len(ranked) < ell:
            continue
        hub = vset(v for _, v in ranked[:ell])
        fans = _fans_for(g, s.small, xs, paths, hub, ell, mode)
        if fans is not None:
            return RobustWitness(s, ell, hub, dict(zip(xs, paths)), fans, mode)
    return None


def _candidate_paths(h, xs):
    yield tuple((x,) for x in xs)
    depth = nx.multi_source_dijkstra_path_length(h, set(xs))
    far = max(depth.values())
    if far == 0:
        return
    flow = nx.Graph(h)
    flow.add_edges_from(("source", x) for x in xs)
    flow.add_edges_from((v, "sink") for v, d in depth.items() if d == far)
    if nx.algorithms.connectivity.local_node_connectivity(flow, "source", "sink") < len(xs):
        return
    ends = {}
    for p in nx.node_disjoint_paths(flow, "source", "sink"):
        ends[p[1]] = tuple(reversed(p[1:-1]))
    yield tuple(ends[x] for x in xs)


def _paths_from(g, allowed, x):
    """Simple paths in G[allowed + x] that end at x, shortest first."""
    yield (x,)
    for length in range(1, size(allowed) + 1):
        stack = [((x,), 1 << x)]
        while stack:
            path, used = stack.pop()
            if len(path) == length + 1:
                yield tuple(reversed(path))
                continue
            ext = g.adj[path[-1]] & allowed & ~used
            for v in reversed(members(ext)):
                stack.append((path + (v,), used | 1 << v))


def _path_systems(g, small, xs, used):
    if not xs:
        yield ()
        return
    x = xs[0]
    for path in _paths_from(g, small & ~used, x):
        mask = vset(path)
        for rest in _path_systems(g, small, xs[1:], used | mask):
            yield (path,) + rest


def _fans_for(g, small, xs, paths, hub, ell, mode):
    fans = {}
    for x, path in zip(xs, paths):
        fan = _fan(g, small | 1 << x, vset(path), hub, mode)
        if fan is None:
            return None
        fans[x] = fan
    return fans


def _fan(g, region, path_mask, hub, mode):
    if hub & ~region:
        return None
    fan = [(u,) for u in members(hub & path_mask)]
    starts = hub & ~path_mask
    if not starts:
        return tuple(fan)
    h = nx.Graph(g.nx_graph.subgraph(members(region)))
    if mode == SHARED_ENDS:
        h.remove_nodes_from(members(path_mask))
        h.add_node("sink")
        h.add_edges_from((v, "sink") for v in members(g.neighbourhood(path_mask) & region & ~path_mask))
    else:
        h.add_node("sink")
        h.add_edges_from((v, "sink") for v in members(path_mask))
    h.add_node("source")
    h.add_edges_from(("source", u) for u in members(starts))
    need = size(starts)
    if nx.algorithms.connectivity.local_node_connectivity(h, "source", "sink") < need:
        return None
    for p in nx.node_disjoint_paths(h, "source", "sink"):
        body = [v for v in p if v not in ("source", "sink")]
        if mode == SHARED_ENDS:
            body.append(lowest(g.adj[body[-1]] & path_mask))
        else:
            first = next(i for i, v in enumerate(body) if path_mask >> v & 1)
            body = body[:first + 1]
        fan.append(tuple(body))
    return tuple(sorted(fan))
