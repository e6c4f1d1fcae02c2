"""Exact treewidth by dynamic programming over eliminated vertex sets.

TW(S) is the best width of an elimination ordering that starts with the
vertices of S. Min-fill gives the upper bound that prunes the layers.
"""
import logging
from dataclasses import dataclass

from networkx.algorithms.approximation import treewidth_min_fill_in

from tangleforge import config
from tangleforge.decompositions import TreeDecomposition
from tangleforge.errors import Refusal
from tangleforge.graph import members, size, vset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TreewidthResult:
    tw: int
    decomposition: TreeDecomposition
    order: tuple


def _component_of(g, start, inside):
    reach = 1 << start
    frontier = reach
    while frontier:
        grown = g.neighbourhood(frontier) & inside & ~reach
        reach |= grown
        frontier = grown
    return reach


def q_size(g, eliminated, v):
    """|Q(S, v)|: vertices outside S + v reachable from v through S."""
    reach = _component_of(g, v, eliminated | 1 << v)
    return size(g.neighbourhood(reach) & ~eliminated)


def td_from_order(g, order):
    """Tree-decomposition of the elimination ordering ``order``; forest roots are chained."""
    position = {v: i for i, v in enumerate(order)}
    bags = {}
    parent = {}
    eliminated = 0
    for v in order:
        reach = _component_of(g, v, eliminated | 1 << v)
        later = g.neighbourhood(reach) & ~eliminated
        bags[v] = later | 1 << v
        parent[v] = min(members(later), key=position.get) if later else None
        eliminated |= 1 << v
    edges = [(v, p) for v, p in parent.items() if p is not None]
    roots = [v for v in order if parent[v] is None]
    edges.extend(zip(roots, roots[1:]))
    return TreeDecomposition.build(bags, edges)


def _from_networkx(decomposition):
    nodes = sorted(decomposition.nodes, key=lambda bag: sorted(bag))
    index = {bag: i for i, bag in enumerate(nodes)}
    bags = {i: vset(bag) for bag, i in index.items()}
    return TreeDecomposition.build(bags, [(index[u], index[v]) for u, v in decomposition.edges])


def exact_treewidth(g, bound=config.TREEWIDTH_BOUND):
    if g.n > bound:
        raise Refusal(f"exact treewidth is limited to {bound} vertices, got {g.n}", status="bound",
                      details={"n": g.n, "bound": bound})
    if g.n == 0:
        return TreewidthResult(-1, TreeDecomposition.build({0: 0}, []), ())
    upper, decomposition = treewidth_min_fill_in(g.nx_graph)
    layer = {0: -1}
    back = {}
    for _ in range(g.n):
        nxt = {}
        for state, value in layer.items():
            for v in members(g.full & ~state):
                width = max(value, q_size(g, state, v))
                if width >= upper:
                    continue
                grown = state | 1 << v
                if grown not in nxt or width < nxt[grown]:
                    nxt[grown] = width
                    back[grown] = (state, v)
        layer = nxt
        if not layer:
            break
    if g.full in layer:
        order = []
        state = g.full
        while state:
            state, v = back[state]
            order.append(v)
        order.reverse()
        tw = layer[g.full]
        td = td_from_order(g, order)
        logger.debug("treewidth %d below min-fill bound %d", tw, upper)
        return TreewidthResult(tw, td, tuple(order))
    logger.debug("min-fill bound %d is optimal", upper)
    return TreewidthResult(upper, _from_networkx(decomposition), ())


def width_within(g, w, bound=config.TREEWIDTH_BOUND):
    """A width witnessing tw(g) <= w when one exists: the min-fill width if it is <= w, else the exact treewidth.

    Graphs above ``bound`` vertices whose min-fill width exceeds ``w`` are refused.
    """
    if g.n == 0:
        return -1
    upper, _ = treewidth_min_fill_in(g.nx_graph)
    if upper <= w:
        return upper
    return exact_treewidth(g, bound).tw


def treewidth_at_most(g, w):
    return width_within(g, w) <= w
