"""Brambles, their order, and the conversions between brambles and U_k-tangles."""
import logging
from dataclasses import dataclass, field
from itertools import combinations

import networkx as nx

from tangleforge import config
from tangleforge.duality import STREE, TANGLE, duality
from tangleforge.errors import InvalidArgument, Refusal, SoundnessError
from tangleforge.families import uk
from tangleforge.graph import lowest, members, size, vset
from tangleforge.orientations import Orientation, find_f_tangles, is_f_tangle
from tangleforge.separations import enumerate_separations, sort_separations
from tangleforge.treewidth import exact_treewidth

logger = logging.getLogger(__name__)

CONSTRUCTED = "constructed"
EXHAUSTIVE = "exhaustive"
TREEWIDTH = "treewidth"


def canonical(bramble):
    return tuple(sorted(set(bramble), key=lambda m: (size(m), members(m))))


def touch(g, x, y):
    return bool(x & y) or bool(g.neighbourhood(x) & y)


@dataclass(frozen=True)
class BrambleReport:
    valid: bool
    order: int
    cover: int
    violation: str = ""


def minimum_cover(g, bramble):
    """Smallest vertex set meeting every element, first in canonical order."""
    pool = members(0 if not bramble else vset(v for m in bramble for v in members(m)))
    for width in range(len(pool) + 1):
        for picked in combinations(pool, width):
            mask = vset(picked)
            if all(mask & m for m in bramble):
                return mask
    return 0


def bramble_order(g, bramble):
    bramble = canonical(bramble)
    for m in bramble:
        if m & ~g.full:
            return BrambleReport(False, 0, 0, f"{list(members(m))} has vertices outside the graph")
        if not g.is_connected_set(m):
            return BrambleReport(False, 0, 0, f"{list(members(m))} is not connected")
    for x, y in combinations(bramble, 2):
        if not touch(g, x, y):
            return BrambleReport(False, 0, 0, f"{list(members(x))} and {list(members(y))} do not touch")
    cover = minimum_cover(g, bramble)
    return BrambleReport(True, size(cover), cover)


def bramble_to_tangle(g, k, bramble):
    """Orient every separation of order < k toward the side whose strict part holds a bramble element."""
    report = bramble_order(g, bramble)
    if not report.valid:
        raise InvalidArgument(f"not a bramble: {report.violation}")
    if report.order < k:
        raise Refusal(f"bramble has order {report.order} < {k}", status="impossible",
                      details={"order": report.order, "k": k})
    system = enumerate_separations(g, k)
    chosen = set()
    for m in system:
        r = m.reverse()
        if any(e & ~m.big == 0 for e in bramble):
            chosen.add(m)
        elif any(e & ~r.big == 0 for e in bramble):
            chosen.add(r)
        else:
            raise SoundnessError(f"no bramble element lies behind {m.describe(g)}")
    tangle = Orientation(system, frozenset(chosen))
    if not is_f_tangle(tangle, uk(k)):
        raise SoundnessError("bramble orientation is not a U_k-tangle")
    return tangle


def maximal_separations(tau):
    return [s for s in sort_separations(tau.elements) if not any(s.lt(t) for t in tau.elements)]


def _grow(g, s):
    """Connected U inside the strict big side, from its least vertex, touching every separator vertex."""
    side = s.big
    if not side:
        raise SoundnessError(f"{s.describe(g)} has an empty strict big side")
    grown = 1 << lowest(side)
    h = g.nx_graph.subgraph(members(side))
    for x in members(s.separator):
        if g.adj[x] & grown:
            continue
        targets = g.adj[x] & side
        if not targets:
            raise SoundnessError(f"separator vertex {g.label(x)} has no neighbour behind {s.describe(g)}")
        paths = nx.multi_source_dijkstra_path(h, set(members(grown)))
        reachable = [t for t in members(targets) if t in paths]
        if not reachable:
            raise SoundnessError(f"strict big side of {s.describe(g)} does not reach {g.label(x)}")
        best = min(reachable, key=lambda t: (len(paths[t]), t))
        grown |= vset(paths[best])
    return grown


def tangle_to_bramble(g, k, tau):
    if not is_f_tangle(tau, uk(k)):
        raise InvalidArgument("orientation is not a U_k-tangle")
    bramble = canonical(_grow(g, s) for s in maximal_separations(tau))
    report = bramble_order(g, bramble)
    if not report.valid or report.order < k:
        raise SoundnessError(f"tangle gives bramble of order {report.order}: {report.violation or 'too small'}")
    logger.debug("bramble of %d elements and order %d from a %d-tangle", len(bramble), report.order, k)
    return bramble


def connected_sets(g):
    return [m for m in range(1, g.full + 1) if g.is_connected_set(m)]


@dataclass(frozen=True)
class MaximumBramble:
    order: int
    bramble: tuple
    cover: int


def max_bramble_order(g, bound=config.BRAMBLE_SEARCH_BOUND):
    """Exhaustive maximum over maximal families of pairwise touching connected sets."""
    if g.n > bound:
        raise Refusal(f"bramble search is limited to {bound} vertices", status="bound", details={"n": g.n})
    if g.n == 0:
        return MaximumBramble(0, (), 0)
    sets = connected_sets(g)
    h = nx.Graph()
    h.add_nodes_from(sets)
    h.add_edges_from((x, y) for x, y in combinations(sets, 2) if touch(g, x, y))
    best = None
    for clique in nx.find_cliques(h):
        bramble = canonical(clique)
        cover = minimum_cover(g, bramble)
        key = (-size(cover), len(bramble), [members(m) for m in bramble])
        if best is None or key < best[0]:
            best = (key, MaximumBramble(size(cover), bramble, cover))
    return best[1]


@dataclass(frozen=True)
class Theorem4Report:
    tangle: bool
    bramble: bool
    no_stree: bool
    treewidth: bool
    witnesses: dict = field(default_factory=dict)
    bramble_provenance: str = ""

    @property
    def clauses(self):
        return (self.tangle, self.bramble, self.no_stree, self.treewidth)

    @property
    def agree(self):
        return len(set(self.clauses)) == 1


def theorem4_report(g, k):
    """Tangle, bramble of order >= k, no S-tree over U_k, and treewidth >= k-1, checked separately."""
    family = uk(k)
    tangles = find_f_tangles(g, k, family, limit=1)
    cert = duality(g, k, family)
    tw = exact_treewidth(g)
    witnesses = {"tw": tw}
    if tangles:
        witnesses["tangle"] = tangles[0]
        witnesses["bramble"] = tangle_to_bramble(g, k, tangles[0])
        has_bramble, provenance = True, CONSTRUCTED
    elif g.n <= config.BRAMBLE_SEARCH_BOUND:
        best = max_bramble_order(g)
        has_bramble, provenance = best.order >= k, EXHAUSTIVE
        if has_bramble:
            witnesses["bramble"] = best.bramble
    else:
        has_bramble, provenance = tw.tw + 1 >= k, TREEWIDTH
    if cert.verdict == STREE:
        witnesses["stree"] = cert.stree
    report = Theorem4Report(bool(tangles), has_bramble, cert.verdict == TANGLE, tw.tw >= k - 1, witnesses, provenance)
    if not report.agree:
        raise SoundnessError(f"clauses disagree at k={k}: {report.clauses}")
    logger.info("k=%d: all four clauses %s", k, report.tangle)
    return report
