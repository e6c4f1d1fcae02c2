"""Sets of stars that orientations have to avoid.

A family is described by a ``FamilySpec`` and never materialised: membership of
a candidate set and the searches the engines need (a member inside a given
orientation, a member through a given separation) are decided per kind.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations

import networkx as nx

from tangleforge.errors import InvalidArgument
from tangleforge.graph import size
from tangleforge.separations import Separation, interior, sort_separations, star_compatible, star_violation

logger = logging.getLogger(__name__)

TK = "tk"
TSTAR = "tstar"
PK = "pk"
PPRIME = "pprime"
UK = "uk"
UK_INFINITE = "uk_infinite"
AUGMENTED = "augmented"
EXPLICIT = "explicit"
UNION = "union"

KINDS = (TK, TSTAR, PK, PPRIME, UK, UK_INFINITE, AUGMENTED, EXPLICIT, UNION)


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    k: int
    base: "FamilySpec" = None
    sigma: frozenset = frozenset()
    explicit: tuple = ()
    parts: tuple = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown family kind {self.kind}")
        if self.kind == AUGMENTED and self.base is None:
            raise InvalidArgument("an augmented family needs a base family")

    @property
    def m_bound(self):
        """Cap on |int(sigma)| over members, None when unbounded."""
        if self.kind == TSTAR:
            return max(3 * self.k - 3, 0)
        if self.kind in (UK, PPRIME, UK_INFINITE):
            return max(self.k - 1, 0)
        if self.kind == AUGMENTED:
            return self.base.m_bound
        return None

    @property
    def label(self):
        if self.name:
            return self.name
        if self.kind == AUGMENTED:
            return f"{self.base.label}+singletons({len(self.sigma)})"
        return self.kind


def tk(k):
    return FamilySpec(TK, k)


def tstar(k):
    return FamilySpec(TSTAR, k)


def pk(k):
    return FamilySpec(PK, k)


def pprime(k):
    return FamilySpec(PPRIME, k)


def uk(k):
    return FamilySpec(UK, k)


def uk_infinite(k):
    return FamilySpec(UK_INFINITE, k)


def augmented(base, sigma):
    """base plus {reverse(s)} for every s in sigma; its tangles contain sigma."""
    return FamilySpec(AUGMENTED, base.k, base=base, sigma=frozenset(sigma))


def explicit(k, stars, name="custom"):
    return FamilySpec(EXPLICIT, k, explicit=tuple(sorted((frozenset(s) for s in stars),
                                                         key=lambda s: [x.key() for x in sort_separations(s)])),
                      name=name)


def union(*parts):
    return FamilySpec(UNION, max(p.k for p in parts), parts=tuple(parts))


FAMILY_BUILDERS = {
    "tk": tk,
    "tstar": tstar,
    "uk": uk,
    "ustar": uk,
    "pk": pk,
    "pprime": pprime,
}


@dataclass(frozen=True)
class Verdict:
    member: bool
    reason: str

    def __bool__(self):
        return self.member


def profile_corner(x, y):
    """(B n D, A u C) for x=(A,B), y=(C,D)."""
    return Separation(x.b & y.b, x.a | y.a)


def family_member(g, elements, family):
    elements = frozenset(elements)
    if any(s.order >= family.k for s in elements) and family.kind not in (AUGMENTED, UNION, EXPLICIT):
        return Verdict(False, f"a separation has order >= {family.k}")
    kind = family.kind
    if kind == TK:
        if len(elements) > 3:
            return Verdict(False, "more than three separations")
        covered = g.covered_by([s.a for s in elements])
        return Verdict(covered, "small sides cover G" if covered else "small sides miss a vertex or edge")
    if kind in (TSTAR, UK, PPRIME, UK_INFINITE):
        bad = star_violation(g, elements)
        if bad is not None:
            return Verdict(False, f"not a star: {bad[0].describe(g)}, {bad[1].describe(g)}")
        if kind == UK_INFINITE:
            return Verdict(False, "finite star")
        if kind == TSTAR:
            inner = family_member(g, elements, tk(family.k))
            return Verdict(inner.member, inner.reason)
        inside = size(interior(g, elements))
        if kind == UK:
            return Verdict(inside < family.k, f"interior has {inside} vertices")
        if inside >= family.k:
            return Verdict(False, f"interior has {inside} vertices")
        return family_member(g, elements, pk(family.k))
    if kind == PK:
        return _profile_member(elements, family.k)
    if kind == AUGMENTED:
        if len(elements) == 1 and next(iter(elements)).reverse() in family.sigma:
            return Verdict(True, "singleton of an inverted star element")
        return family_member(g, elements, family.base)
    if kind == EXPLICIT:
        hit = elements in family.explicit
        return Verdict(hit, "listed" if hit else "not listed")
    for part in family.parts:
        v = family_member(g, elements, part)
        if v:
            return Verdict(True, f"{part.label}: {v.reason}")
    return Verdict(False, "in no part")


def _profile_member(elements, k):
    if not 1 <= len(elements) <= 3:
        return Verdict(False, "profile triples have one to three elements")
    for x in elements:
        for y in elements:
            corner = profile_corner(x, y)
            if corner.order < k and elements == frozenset((x, y, corner)):
                return Verdict(True, f"corner of {sorted_pair(x, y)}")
    return Verdict(False, "no element is the corner of the others")


def sorted_pair(x, y):
    return " and ".join(s.describe() for s in sort_separations({x, y}))


def compatibility_graph(elements):
    """Star-compatibility graph on ``elements``; (V,V) is left isolated."""
    h = nx.Graph()
    h.add_nodes_from(elements)
    ordered = sort_separations(elements)
    for r, s in combinations(ordered, 2):
        if star_compatible(r, s):
            h.add_edge(r, s)
    return h


def _maximal_stars(g, elements, through=None):
    """Maximal stars among ``elements`` (containing ``through`` when given)."""
    pool = set(elements)
    if through is not None:
        pool = {r for r in pool if r != through and star_compatible(r, through)}
    full = Separation(g.full, g.full)
    pool.discard(full)
    h = compatibility_graph(pool)
    if not pool:
        yield frozenset() if through is None else frozenset((through,))
        return
    for clique in nx.find_cliques(h):
        star = frozenset(clique)
        yield star if through is None else star | {through}


def _small_subsets(g, elements, through, star_only):
    """Subsets of size <= 3 of elements + through (containing ``through`` when given)."""
    ordered = sort_separations(set(elements) - ({through} if through is not None else set()))
    if through is None:
        yield frozenset()
        for r in ordered:
            yield frozenset((r,))
        for pair in combinations(ordered, 2):
            if not star_only or star_compatible(*pair):
                yield frozenset(pair)
        for triple in combinations(ordered, 3):
            if not star_only or all(star_compatible(a, b) for a, b in combinations(triple, 2)):
                yield frozenset(triple)
        return
    yield frozenset((through,))
    partners = [r for r in ordered if not star_only or star_compatible(r, through)]
    for r in partners:
        yield frozenset((through, r))
    for r, s in combinations(partners, 2):
        if not star_only or star_compatible(r, s):
            yield frozenset((through, r, s))


def _cover_candidates(g, elements, through, star_only):
    need = g.full
    for subset in _small_subsets(g, elements, through, star_only):
        union_a = 0
        for s in subset:
            union_a |= s.a
        if union_a == need and g.covered_by([s.a for s in subset]):
            if not star_only or star_violation(g, subset) is None:
                yield subset


def find_member(g, elements, family, through=None):
    """First member of ``family`` inside elements + through, containing ``through`` if given.

    Returns None when there is none.
    """
    elements = frozenset(elements)
    if through is not None:
        elements = elements | {through}
    kind = family.kind
    if kind in (TK, TSTAR):
        small = {s for s in elements if s.order < family.k}
        if through is not None and through not in small:
            return None
        for subset in _cover_candidates(g, small, through, kind == TSTAR):
            return subset
        return None
    if kind == UK:
        small = {s for s in elements if s.order < family.k}
        if through is not None and (through not in small or through == Separation(g.full, g.full)):
            return None
        best = None
        for star in _maximal_stars(g, small, through):
            if size(interior(g, star)) < family.k:
                star = frozenset(sort_separations(star))
                if best is None or _star_key(star) < _star_key(best):
                    best = star
        return best
    if kind == UK_INFINITE:
        return None
    if kind in (PK, PPRIME):
        return _find_profile_member(g, elements, family, through)
    if kind == AUGMENTED:
        for s in sort_separations(family.sigma):
            rev = s.reverse()
            if rev in elements and (through is None or through == rev):
                return frozenset((rev,))
        return find_member(g, elements - ({through} if through is not None else set()), family.base, through)
    if kind == EXPLICIT:
        for star in family.explicit:
            if star <= elements and (through is None or through in star):
                return star
        return None
    for part in family.parts:
        hit = find_member(g, elements - ({through} if through is not None else set()), part, through)
        if hit is not None:
            return hit
    return None


def _star_key(star):
    return (len(star), [s.key() for s in sort_separations(star)])


def _find_profile_member(g, elements, family, through):
    ordered = sort_separations(elements)
    for x in ordered:
        for y in ordered:
            corner = profile_corner(x, y)
            if corner.order >= family.k or corner not in elements:
                continue
            triple = frozenset((x, y, corner))
            if through is not None and through not in triple:
                continue
            if family_member(g, triple, family):
                return triple
    return None


def avoids(g, elements, family):
    return find_member(g, elements, family) is None


def extend_to_member(g, s, candidates, family):
    """A member of ``family`` containing ``s`` whose other elements all lie in ``candidates``."""
    return find_member(g, frozenset(candidates) - {s}, family, through=s)


def iter_members(g, oriented, family, max_size=3):
    """Members of ``family`` made of at most ``max_size`` separations from ``oriented``."""
    ordered = sort_separations(oriented)
    for width in range(max_size + 1):
        for subset in combinations(ordered, width):
            subset = frozenset(subset)
            if family_member(g, subset, family):
                yield subset
