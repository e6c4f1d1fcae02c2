"""Refining inessential stars, extending restricted tangles, and trees of tangles."""
import logging
from dataclasses import dataclass, field
from itertools import count

import networkx as nx

from tangleforge import config
from tangleforge.decompositions import (STree, TreeDecomposition, glue_construction, induced_separations,
                                        stree_to_td, td_from_nested, validate_stree, validate_td)
from tangleforge.duality import STREE, duality
from tangleforge.errors import InvalidArgument, Refusal, SoundnessError
from tangleforge.families import augmented, compatibility_graph, explicit, family_member, pk, tk, uk, union
from tangleforge.graph import members, size, vset
from tangleforge.orientations import Orientation, closely_related, distinguishers, find_f_tangles, is_f_tangle
from tangleforge.separations import (Separation, enumerate_separations, interior, left_robust, nested,
                                     orientation_pair, restricted_bound, sort_separations, star_ops)
from tangleforge.treewidth import width_within

logger = logging.getLogger(__name__)

CLOSELY_RELATED = "closely_related"
ROBUST = "robust"


@dataclass(frozen=True)
class ExtensionWitness:
    mode: str
    profile: Orientation = None
    robust: object = None


def robustness_ell(k, m):
    return max(3 * k - 2, k * (k - 1) * m + m)


def related_profile(g, k, family, s):
    """An F-avoiding k-profile to which reverse(s) is closely related, or None.

    Separations x with corner(reverse(s), x) of order >= k are forbidden during the search.
    """
    rev = s.reverse()
    system = enumerate_separations(g, k)
    unrelated = [{x} for x in system.oriented if rev.meet(x).order >= k]
    forbidden = union(family, pk(k), explicit(k, unrelated, name="unrelated"))
    found = find_f_tangles(g, k, forbidden, limit=1, system=system, require={rev})
    return found[0] if found else None



def extension_witness(g, k, family, s, ell, budget=config.DEFAULT_ROBUST_BUDGET):
    try:
        return ExtensionWitness(ROBUST, robust=left_robust(g, s, ell, budget))
    except Refusal as exc:
        logger.debug("%s is not left-%d-robust: %s", s.describe(g), ell, exc.reason)
    profile = related_profile(g, k, family, s)
    if profile is not None:
        return ExtensionWitness(CLOSELY_RELATED, profile=profile)
    raise Refusal(f"{s.describe(g)} is neither left-{ell}-robust nor has an inverse closely related "
                  f"to an avoiding {k}-profile", status="impossible",
                  details={"separation": s.as_lists(), "ell": ell})


def _nested_orientation(r, s):
    """The orientation of r lying below s, the one with the smaller small side first."""
    for x in orientation_pair(r):
        if x.leq(s):
            return x
    return None


def _meets_all_paths(side, witness):
    return all(side & vset(path) for path in witness.robust.paths.values())


def extend_tangle(g, k, tau, sigma, s, witness, family):
    """Extend an orientation of S_k^sigma to one of S_k^(sigma - s).

    ``family`` is the augmented family the tangle avoids; the result avoids it too.
    """
    sigma = frozenset(sigma)
    if s not in sigma:
        raise InvalidArgument(f"{s.describe(g)} is not in the star")
    rest = sigma - {s}
    system = enumerate_separations(g, k, rest)
    old = tau.system
    chosen = set()
    for r in system:
        if r in old:
            chosen.add(tau.orient(r))
            continue
        below = _nested_orientation(r, s)
        if below is not None:
            chosen.add(below)
            continue
        if r.reverse().leq(s) or s.leq(r) or s.leq(r.reverse()):
            raise SoundnessError(f"{r.describe(g)} is nested with {s.describe(g)} but was not oriented")
        chosen.add(_orient_crossing(g, k, r, s, tau, witness))
    extended = Orientation(system, frozenset(chosen))
    if not tau.elements <= extended.elements or not is_f_tangle(extended, family):
        raise SoundnessError(f"extension past {s.describe(g)} is not a tangle containing its input")
    return extended


def _orient_crossing(g, k, r, s, tau, witness):
    r = orientation_pair(r)[0]
    if witness.mode == CLOSELY_RELATED:
        t = r.meet(s.reverse()) if r in witness.profile else r.join(s)
        return r if _oriented_as(g, tau, t) else r.reverse()
    if _meets_all_paths(r.a, witness):
        t = r.join(s)
        return r if _oriented_as(g, tau, t) else r.reverse()
    if _meets_all_paths(r.b, witness):
        t = r.reverse().join(s)
        return r.reverse() if _oriented_as(g, tau, t) else r
    raise SoundnessError(f"neither side of {r.describe(g)} meets every separator path")


def _oriented_as(g, tau, t):
    if t not in tau.system:
        raise SoundnessError(f"corner {t.describe(g)} has order {t.order} or lies outside the restricted system")
    return t in tau


@dataclass(frozen=True)
class InessentialRefinement:
    verdict: str
    stree: STree = None
    tangle: Orientation = None
    witnesses: dict = field(default_factory=dict)
    restricted_size: int = 0
    restricted_bound: int = 0


def refine_inessential_star(g, k, family, sigma, budget=config.DEFAULT_ROBUST_BUDGET):
    """A tangle of S_k(G) containing sigma, or an S-tree with every element of sigma as a leaf separation."""
    sigma = frozenset(sigma)
    star_ops(g, sigma, k)
    if any(s.order >= k for s in sigma):
        raise InvalidArgument(f"the star has a separation of order >= {k}")
    if family.m_bound is None:
        raise InvalidArgument(f"the {family.label} family has no interior bound")
    ell = robustness_ell(k, family.m_bound)
    witnesses = {s: extension_witness(g, k, family, s, ell, budget) for s in sort_separations(sigma)}
    augmented_family = augmented(family, sigma)
    system = enumerate_separations(g, k, sigma)
    bound = restricted_bound(g, k, sigma) if sigma else len(system)
    if len(system) > bound:
        raise SoundnessError(f"restricted system has {len(system)} members, more than {bound}")
    cert = duality(g, k, augmented_family, system=system)
    if cert.verdict == STREE:
        missing = sigma - cert.stree.leaf_separations()
        if missing:
            raise SoundnessError(f"{next(iter(missing)).describe(g)} is not a leaf separation")
        return InessentialRefinement(STREE, stree=cert.stree, witnesses=witnesses,
                                     restricted_size=len(system), restricted_bound=bound)
    tau = cert.tangle
    current = sigma
    for s in sort_separations(sigma):
        tau = extend_tangle(g, k, tau, current, s, witnesses[s], augmented_family)
        current = current - {s}
    return InessentialRefinement("tangle", tangle=tau, witnesses=witnesses,
                                 restricted_size=len(system), restricted_bound=bound)


@dataclass(frozen=True)
class TreeOfTangles:
    decomposition: TreeDecomposition
    tangles: tuple
    nested: tuple


def _pick_nested(pairs, options, chosen):
    if not pairs:
        return chosen
    (i, j), rest = pairs[0], pairs[1:]
    if any(m in options[(i, j)] for m in chosen):
        return _pick_nested(rest, options, chosen)
    for m in options[(i, j)]:
        if all(nested(m, c) for c in chosen):
            found = _pick_nested(rest, options, chosen + [m])
            if found is not None:
                return found
    return None


def build_tree_of_tangles(g, k, bound=config.TREE_OF_TANGLES_BOUND):
    if g.n > bound:
        raise Refusal(f"trees of tangles are limited to {bound} vertices", status="bound", details={"n": g.n})
    tangles = tuple(find_f_tangles(g, k, tk(k), limit=None))
    pairs = [(i, j) for i in range(len(tangles)) for j in range(i + 1, len(tangles))]
    options = {(i, j): distinguishers(tangles[i], tangles[j]).efficient for i, j in pairs}
    chosen = _pick_nested(pairs, options, [])
    if chosen is None:
        raise SoundnessError("no nested set of efficient distinguishers")
    td = td_from_nested(g, k, chosen)
    report = validate_td(g, td)
    if not report.valid:
        raise SoundnessError(f"tree of tangles is not a tree-decomposition: {report.witness}")
    logger.info("tree of %d tangles with %d edges", len(tangles), td.tree.number_of_edges())
    return TreeOfTangles(td, tangles, tuple(sort_separations(chosen)))


@dataclass(frozen=True)
class ExclusiveStar:
    star: frozenset
    interior_size: int
    global_minimum: int


def _exclusive(star, tau, tangles):
    return all(not star <= other.elements for other in tangles if other.elements != tau.elements)


def _dominated(sigma, rho):
    return all(any(x.leq(y) for y in rho) for x in sigma)


def _maximal_stars(elements):
    return [frozenset(c) for c in nx.find_cliques(compatibility_graph(elements))]


def minimize_exclusive_star(g, k, tau, sigma, tangles, bound=config.EXCLUSIVE_STAR_BOUND):
    """A star in tau above sigma, closely related to tau, with the least interior among exclusive stars."""
    if g.n > bound:
        raise Refusal(f"exclusive-star search is limited to {bound} vertices", status="bound", details={"n": g.n})
    sigma = frozenset(sigma)
    if not sigma <= tau.elements or not _exclusive(sigma, tau, tangles):
        raise Refusal("the star is not exclusive for the given tangles", status="impossible")
    full = Separation(g.full, g.full)
    pool = [s for s in tau.elements if s != full]
    overall = [c for c in _maximal_stars(pool) if _exclusive(c, tau, tangles)]
    global_min = min(size(interior(g, c)) for c in overall)
    related = [s for s in pool if closely_related(s, tau, k)]
    best = None
    for clique in _maximal_stars(related):
        if not _dominated(sigma, clique) or not _exclusive(clique, tau, tangles):
            continue
        key = (size(interior(g, clique)), len(clique), [s.key() for s in sort_separations(clique)])
        if best is None or key < best[0]:
            best = (key, clique)
    if best is None or best[0][0] != global_min:
        raise SoundnessError("no closely related star above the input reaches the least exclusive interior")
    star = best[1]
    inside = interior(g, star)
    for s in sort_separations(star):
        smaller = star - {s}
        if interior(g, smaller) == inside and _dominated(sigma, smaller) and _exclusive(smaller, tau, tangles):
            star = smaller
    return ExclusiveStar(star, size(inside), global_min)


def _merge_centre(trees):
    """Disjoint union of ``trees`` with each marked node identified into one centre."""
    numbers = count(1)
    labelled = []
    for st, centre in trees:
        rename = {x: (0 if x == centre else next(numbers)) for x in sorted(st.tree.nodes)}
        for u, v, sep in st.labelled_edges():
            labelled.append((rename[u], rename[v], sep))
    return STree.build(range(next(numbers)), labelled)


def _essential_piece(g, k, family, sigma_t, sigma_prime, budget):
    assigned = {s: set() for s in sigma_prime}
    for r in sort_separations(sigma_t):
        home = r if r in sigma_prime else next((s for s in sort_separations(sigma_prime) if r.leq(s)), None)
        if home is None:
            raise SoundnessError(f"{r.describe(g)} lies below no element of the minimized star")
        assigned[home].add(r)
    trees = []
    for s in sort_separations(sigma_prime):
        if s in assigned[s]:
            trees.append((STree.build([0, 1], [(1, 0, s)]), 0))
            continue
        rho = frozenset({s.reverse()} | assigned[s])
        piece = refine_inessential_star(g, k, family, rho, budget)
        if piece.verdict != STREE:
            raise SoundnessError(f"the star around {s.describe(g)} is home to a tangle")
        st = piece.stree
        centre = next(x for x, u in st.leaf_edges() if st.alpha[(x, u)] == s.reverse())
        trees.append((st, centre))
    return _merge_centre(trees)


@dataclass(frozen=True)
class RefinedTree:
    stree: STree
    decomposition: TreeDecomposition
    essential: dict
    tangles: tuple


def check_premise(g, k, td, tangles):
    seps = induced_separations(td)
    for (u, v), sep in sorted(seps.items()):
        if not any(any(m.same_separation(sep) for m in distinguishers(a, b).efficient)
                   for i, a in enumerate(tangles) for b in tangles[i + 1:]):
            raise Refusal(f"edge {u}-{v} does not efficiently distinguish two tangles", status="impossible",
                          details={"edge": [u, v]})
    for i, a in enumerate(tangles):
        for j in range(i + 1, len(tangles)):
            b = tangles[j]
            if not any(a.orient(sep) != b.orient(sep) for sep in seps.values() if sep in a.system):
                raise Refusal(f"tangles {i} and {j} are not distinguished by the decomposition",
                              status="impossible", details={"pair": [i, j]})


def check_glued_stars(g, st, family, essential_stars=(), sigmas=()):
    """Every node star of ``st`` is in ``family``, is an essential star, or is a leaf singleton of some input star.

    Leaf singletons are {x} and {reverse(x)} for x in a star of ``sigmas`` or ``essential_stars``.
    """
    allowed = set(frozenset(s) for s in essential_stars)
    for sigma in list(sigmas) + list(essential_stars):
        for x in sigma:
            allowed.add(frozenset({x}))
            allowed.add(frozenset({x.reverse()}))
    for node in sorted(st.tree.nodes):
        star = st.star(node)
        if star not in allowed and not family_member(g, star, family):
            raise SoundnessError(f"glued node {node} has a star outside the family")


def refine_tree_of_tangles(g, k, family, td, budget=config.DEFAULT_ROBUST_BUDGET):
    tangles = tuple(find_f_tangles(g, k, family, limit=None))
    check_premise(g, k, td, tangles)
    seps = induced_separations(td)
    pieces = {}
    essential = {}
    sigmas = []
    for t in sorted(td.tree.nodes):
        sigma_t = frozenset(seps[(u, t)] for u in td.tree.neighbors(t))
        sigmas.append(sigma_t)
        homes = [tau for tau in tangles if sigma_t <= tau.elements]
        if len(homes) > 1:
            raise Refusal(f"node {t} is home to {len(homes)} tangles", status="impossible", details={"node": t})
        if homes:
            found = minimize_exclusive_star(g, k, homes[0], sigma_t, tangles)
            essential[t] = found
            pieces[t] = _essential_piece(g, k, family, sigma_t, found.star, budget)
        elif not family_member(g, sigma_t, family):
            piece = refine_inessential_star(g, k, family, sigma_t, budget)
            if piece.verdict != STREE:
                raise SoundnessError(f"inessential node {t} is home to an extended tangle")
            pieces[t] = piece.stree
    glued = glue_construction(g, td, pieces)
    extra = [found.star for found in essential.values()]
    report = validate_stree(g, glued)
    if not report.valid:
        raise SoundnessError("glued tree has a node without a star")
    check_glued_stars(g, glued, family, extra, sigmas)
    out = stree_to_td(g, glued)
    check = validate_td(g, out, other=td)
    if not check.valid or not check.refines_other:
        raise SoundnessError(f"refined decomposition fails: {check.witness or 'does not refine its input'}")
    logger.info("refined %d-node decomposition into %d nodes", td.tree.number_of_nodes(),
                out.tree.number_of_nodes())
    return RefinedTree(glued, out, essential, tangles)


@dataclass(frozen=True)
class TorsoDecomposition:
    decomposition: TreeDecomposition
    width: int
    ell: int
    torso_vertices: tuple


def corollary_6_3_check(g, w, sigma, budget=config.DEFAULT_ROBUST_BUDGET):
    """Tree-decomposition of torso(sigma) of width <= w from robust separations of a graph of treewidth <= w."""
    sigma = frozenset(sigma)
    k = w + 2
    ell = (w + 1) ** 2 * (w + 2) + w + 1
    tw = width_within(g, w)
    if tw > w:
        raise Refusal(f"treewidth {tw} exceeds {w}", status="impossible", details={"tw": tw})
    if any(s.order > w + 1 for s in sigma):
        raise Refusal(f"a separation of the star has order above {w + 1}", status="impossible")
    info = star_ops(g, sigma, k)
    for s in sort_separations(sigma):
        left_robust(g, s, ell, budget)
    piece = refine_inessential_star(g, k, uk(k), sigma, budget)
    if piece.verdict != STREE:
        raise SoundnessError(f"treewidth {tw} <= {w} but a tangle lives in the star")
    full = stree_to_td(g, piece.stree)
    inner = info.interior
    local = info.torso
    bags = {t: local.to_local(b & inner) for t, b in full.bags.items()}
    td = TreeDecomposition(full.tree.copy(), bags)
    report = validate_td(local.graph, td)
    if not report.valid or report.width > w:
        raise SoundnessError(f"restricted bags fail on the torso: {report.witness or report.width}")
    return TorsoDecomposition(td, report.width, ell, tuple(members(inner)))
