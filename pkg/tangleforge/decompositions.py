"""S-trees and tree-decompositions.

``STree.alpha[(u, v)]`` is the separation on the edge oriented from u to v: its
small side lies toward u, so the star at a node t is {alpha[(u, t)] : u ~ t}.
Bags of a ``TreeDecomposition`` are vertex bitmasks.
"""
import logging
from collections import deque
from dataclasses import dataclass, field

import networkx as nx
from networkx.utils import UnionFind

from tangleforge.errors import GluingError, StructureError
from tangleforge.families import Verdict, explicit, family_member
from tangleforge.graph import lowest, members, size, vset
from tangleforge.orientations import find_f_tangles
from tangleforge.separations import Separation, SeparationSystem, interior, is_separation, sort_separations, star_violation

logger = logging.getLogger(__name__)


@dataclass
class STree:
    tree: nx.Graph
    alpha: dict = field(default_factory=dict)

    @classmethod
    def build(cls, nodes, labelled_edges):
        """labelled_edges: iterable of (u, v, alpha(u, v))."""
        tree = nx.Graph()
        tree.add_nodes_from(nodes)
        alpha = {}
        for u, v, sep in labelled_edges:
            tree.add_edge(u, v)
            alpha[(u, v)] = sep
            alpha[(v, u)] = sep.reverse()
        return cls(tree, alpha)

    @classmethod
    def single_node(cls):
        return cls.build([0], [])

    def star(self, t):
        return frozenset(self.alpha[(u, t)] for u in self.tree.neighbors(t))

    def leaves(self):
        if self.tree.number_of_nodes() < 2:
            return []
        return sorted(t for t in self.tree.nodes if self.tree.degree(t) == 1)

    def leaf_edges(self):
        """(leaf, neighbour) pairs in canonical order."""
        return [(x, next(iter(self.tree.neighbors(x)))) for x in self.leaves()]

    def leaf_separations(self):
        return frozenset(self.alpha[(x, u)] for x, u in self.leaf_edges())

    def labelled_edges(self):
        return [(u, v, self.alpha[(u, v)]) for u, v in sorted(tuple(sorted(e)) for e in self.tree.edges)]

    def as_dict(self):
        return {
            "nodes": sorted(self.tree.nodes),
            "edges": [[u, v, sep.as_lists()] for u, v, sep in self.labelled_edges()],
        }

    @classmethod
    def from_dict(cls, doc):
        return cls.build(doc["nodes"], [(u, v, Separation.from_lists(sep)) for u, v, sep in doc["edges"]])


@dataclass
class TreeDecomposition:
    tree: nx.Graph
    bags: dict = field(default_factory=dict)

    @classmethod
    def build(cls, bags, edges):
        tree = nx.Graph()
        tree.add_nodes_from(bags)
        tree.add_edges_from(edges)
        return cls(tree, dict(bags))

    @property
    def max_bag(self):
        return max((size(b) for b in self.bags.values()), default=0)

    @property
    def width(self):
        return self.max_bag - 1

    def bags_at_most(self, k):
        """Width < k in the bag-size convention: every bag has at most k vertices."""
        return self.max_bag <= k

    def adhesion(self):
        return max((size(self.bags[u] & self.bags[v]) for u, v in self.tree.edges), default=0)

    def parents(self):
        root = min(self.tree.nodes)
        parent = {root: None}
        for u, v in nx.bfs_edges(self.tree, root):
            parent[v] = u
        return parent

    def as_dict(self):
        nodes = sorted(self.tree.nodes)
        parent = self.parents()
        return {
            "nodes": nodes,
            "parent": [parent[t] for t in nodes],
            "bags": [list(members(self.bags[t])) for t in nodes],
        }

    @classmethod
    def from_dict(cls, doc):
        bags = {t: vset(b) for t, b in zip(doc["nodes"], doc["bags"])}
        edges = [(t, p) for t, p in zip(doc["nodes"], doc["parent"]) if p is not None]
        return cls.build(bags, edges)


def _check_tree(tree):
    if tree.number_of_nodes() == 0 or not nx.is_tree(tree):
        raise StructureError("the underlying graph is not a tree")


@dataclass(frozen=True)
class STreeReport:
    valid: bool
    over_F: bool
    leaf_separations: frozenset
    node_verdicts: dict
    star_failures: dict
    improper_labels: tuple
    max_degree: int
    weakly_exhaustive: str = "vacuous"


def validate_stree(g, st, family=None):
    _check_tree(st.tree)
    for u, v in st.tree.edges:
        if (u, v) not in st.alpha or (v, u) not in st.alpha:
            raise StructureError(f"edge {u}-{v} has no separation")
        if st.alpha[(v, u)] != st.alpha[(u, v)].reverse():
            raise StructureError(f"labels of edge {u}-{v} are not inverse to each other")
        if not is_separation(g, st.alpha[(u, v)]):
            raise StructureError(f"label of edge {u}-{v} is not a separation")
    failures = {}
    verdicts = {}
    for t in sorted(st.tree.nodes):
        star = st.star(t)
        bad = star_violation(g, star)
        if bad is not None:
            failures[t] = bad
        if family is not None:
            verdicts[t] = family_member(g, star, family)
    improper = tuple(sep for _, _, sep in st.labelled_edges() if g.full in (sep.a, sep.b))
    over = None if family is None else all(verdicts.values())
    return STreeReport(
        valid=not failures,
        over_F=over,
        leaf_separations=st.leaf_separations(),
        node_verdicts=verdicts,
        star_failures=failures,
        improper_labels=improper,
        max_degree=max((d for _, d in st.tree.degree), default=0),
    )


def side_unions(td):
    """(U_t0, U_t1) for every oriented tree edge (t0, t1)."""
    out = {}
    for u, v in td.tree.edges:
        for t0, t1 in ((u, v), (v, u)):
            h = td.tree.copy()
            h.remove_edge(t0, t1)
            side = 0
            for t in nx.node_connected_component(h, t0):
                side |= td.bags[t]
            out[(t0, t1)] = side
    return out


def induced_separations(td):
    unions = side_unions(td)
    return {(u, v): Separation(unions[(u, v)], unions[(v, u)]) for (u, v) in unions}


@dataclass(frozen=True)
class TDReport:
    valid: bool
    witness: str
    width: int
    max_bag: int
    adhesion: int
    refines_other: bool = None

    def bags_at_most(self, k):
        return self.max_bag <= k


def validate_td(g, td, other=None):
    _check_tree(td.tree)
    witness = None
    covered = 0
    for b in td.bags.values():
        covered |= b
    if covered != g.full:
        witness = f"vertex {g.label(lowest(g.full & ~covered))} lies in no bag"
    if witness is None:
        for u, v in g.edges:
            pair = 1 << u | 1 << v
            if not any(b & pair == pair for b in td.bags.values()):
                witness = f"edge {g.label(u)}-{g.label(v)} lies in no bag"
                break
    if witness is None:
        for v in range(g.n):
            holding = [t for t, b in td.bags.items() if b >> v & 1]
            if not nx.is_connected(td.tree.subgraph(holding)):
                witness = f"bags containing vertex {g.label(v)} are not connected"
                break
    refines = None
    if other is not None:
        refines = separation_set(other) <= separation_set(td)
    return TDReport(witness is None, witness or "", td.width, td.max_bag, td.adhesion(), refines)


def separation_set(td):
    return {sep.unoriented() for sep in induced_separations(td).values()}


def stree_to_td(g, st):
    bags = {}
    for t in st.tree.nodes:
        star = st.star(t)
        bad = star_violation(g, star)
        if bad is not None:
            raise StructureError(f"node {t} is not associated with a star")
        bags[t] = interior(g, star)
    return TreeDecomposition(st.tree.copy(), bags)


def td_to_stree(g, td, k):
    seps = induced_separations(td)
    for (u, v), sep in seps.items():
        if sep.order >= k:
            raise StructureError(f"edge {u}-{v} has adhesion {sep.order} >= {k}")
    labelled = [(u, v, seps[(u, v)]) for u, v in td.tree.edges]
    return STree.build(td.tree.nodes, labelled)


def contract_td(td, edges):
    """Contract ``edges``; each branch set keeps its smallest node and the union of its bags."""
    uf = UnionFind(td.tree.nodes)
    for u, v in edges:
        if not td.tree.has_edge(u, v):
            raise StructureError(f"{u}-{v} is not a tree edge")
        uf.union(u, v)
    rep = {}
    for group in uf.to_sets():
        head = min(group)
        for t in group:
            rep[t] = head
    bags = {}
    for t, b in td.bags.items():
        bags[rep[t]] = bags.get(rep[t], 0) | b
    kept = {(min(rep[u], rep[v]), max(rep[u], rep[v])) for u, v in td.tree.edges if rep[u] != rep[v]}
    return TreeDecomposition.build(bags, sorted(kept))


def contract_nested_bags(td):
    """Contract edges whose bags are nested until none is left."""
    while True:
        for u, v in sorted(tuple(sorted(e)) for e in td.tree.edges):
            bu, bv = td.bags[u], td.bags[v]
            if bu & ~bv == 0 or bv & ~bu == 0:
                td = contract_td(td, [(u, v)])
                break
        else:
            return td


def _star_piece(td_seps, t, neighbours):
    labelled = [(i + 1, 0, td_seps[(u, t)]) for i, u in enumerate(neighbours)]
    return STree.build(range(len(neighbours) + 1), labelled)


def _leaf_for(piece, sep, used, t):
    hits = [(x, u) for x, u in piece.leaf_edges() if piece.alpha[(x, u)] == sep and x not in used]
    if not hits:
        raise GluingError(f"node {t}: leaf separation {sep.describe()} missing", node=t, separation=sep)
    if len(hits) > 1:
        raise GluingError(f"node {t}: leaf separation {sep.describe()} appears {len(hits)} times",
                          node=t, separation=sep)
    return hits[0]


def glue_construction(g, td, pieces):
    """Glue S-trees along ``td``; nodes without a piece keep their own star."""
    td_seps = induced_separations(td)
    all_pieces = {}
    for t in sorted(td.tree.nodes):
        if t in pieces:
            all_pieces[t] = pieces[t]
        else:
            all_pieces[t] = _star_piece(td_seps, t, sorted(td.tree.neighbors(t)))
    uf = UnionFind((t, x) for t, p in all_pieces.items() for x in p.tree.nodes)
    used = {t: set() for t in all_pieces}
    for t1, t2 in sorted(tuple(sorted(e)) for e in td.tree.edges):
        x1, u1 = _leaf_for(all_pieces[t1], td_seps[(t2, t1)], used[t1], t1)
        x2, u2 = _leaf_for(all_pieces[t2], td_seps[(t1, t2)], used[t2], t2)
        used[t1].add(x1)
        used[t2].add(x2)
        uf.union((t1, x1), (t2, u2))
        uf.union((t2, x2), (t1, u1))
    groups = sorted((sorted(group) for group in uf.to_sets()), key=lambda grp: grp[0])
    number = {node: i for i, group in enumerate(groups) for node in group}
    alpha = {}
    tree = nx.Graph()
    tree.add_nodes_from(range(len(groups)))
    for t, piece in all_pieces.items():
        for (x, y), sep in piece.alpha.items():
            a, b = number[(t, x)], number[(t, y)]
            if a == b:
                raise GluingError(f"node {t}: gluing collapses edge {x}-{y}", node=t, separation=sep)
            if alpha.get((a, b), sep) != sep:
                raise GluingError(f"node {t}: conflicting labels on glued edge", node=t, separation=sep)
            alpha[(a, b)] = sep
            tree.add_edge(a, b)
    if not nx.is_tree(tree):
        raise GluingError("glued graph is not a tree")
    logger.debug("glued %d pieces into an S-tree with %d nodes", len(all_pieces), tree.number_of_nodes())
    return STree(tree, alpha)


def prune_irredundant(st):
    """Drop branches so no two neighbours of a node send it the same separation."""
    if st.tree.number_of_nodes() <= 1:
        return STree(st.tree.copy(), dict(st.alpha))
    root = min(st.tree.nodes)
    keep = {root}
    queue = deque([(root, None)])
    while queue:
        t, parent = queue.popleft()
        seen = set()
        if parent is not None:
            seen.add(st.alpha[(parent, t)])
        for c in sorted(st.tree.neighbors(t)):
            if c == parent:
                continue
            label = st.alpha[(c, t)]
            if label in seen:
                continue
            seen.add(label)
            keep.add(c)
            queue.append((c, t))
    tree = st.tree.subgraph(keep).copy()
    alpha = {(u, v): sep for (u, v), sep in st.alpha.items() if u in keep and v in keep}
    return STree(tree, alpha)


def is_irredundant(st):
    return all(len(st.star(t)) == st.tree.degree(t) for t in st.tree.nodes)


def td_from_nested(g, k, nested):
    """Tree-decomposition whose induced separations are ``nested``.

    Nodes are the consistent orientations of the nested set, adjacent when they
    differ in one separation; a bag is the intersection of the big sides.
    """
    nested = sort_separations({s.unoriented() for s in nested})
    if not nested:
        return TreeDecomposition.build({0: g.full}, [])
    system = SeparationSystem(g, k, nested)
    nodes = find_f_tangles(g, k, explicit(k, []), limit=None, system=system)
    bags = {i: interior(g, o.elements) for i, o in enumerate(nodes)}
    edges = []
    for i, o in enumerate(nodes):
        for j in range(i + 1, len(nodes)):
            if len(o.elements - nodes[j].elements) == 1:
                edges.append((i, j))
    td = TreeDecomposition.build(bags, edges)
    _check_tree(td.tree)
    return td


def stree_verdict(g, st, family):
    report = validate_stree(g, st, family)
    return Verdict(report.valid and bool(report.over_F), "every node star is in the family" if report.over_F
                   else "some node star is outside the family")
