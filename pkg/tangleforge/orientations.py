import logging
from dataclasses import dataclass, field
from itertools import combinations

from tangleforge import config
from tangleforge.errors import InvalidArgument
from tangleforge.families import find_member, family_member, iter_members, profile_corner
from tangleforge.graph import components
from tangleforge.separations import Separation, enumerate_separations, orientation_pair, sort_separations, star_violation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Orientation:
    system: object = field(compare=False, hash=False, repr=False)
    elements: frozenset = frozenset()

    def __contains__(self, sep):
        return sep in self.elements

    def __iter__(self):
        return iter(sort_separations(self.elements))

    def __len__(self):
        return len(self.elements)

    def orient(self, sep):
        if sep in self.elements:
            return sep
        if sep.reverse() in self.elements:
            return sep.reverse()
        return None

    def is_total(self):
        return len(self.elements) == len(self.system) and all(self.orient(m) is not None for m in self.system)

    def as_lists(self):
        return [s.as_lists() for s in self]


@dataclass(frozen=True)
class OrientationFlags:
    consistent: bool
    regular: bool
    avoids_F: bool
    profile: bool
    principal: bool
    violation: frozenset = None
    inconsistent_pair: tuple = None


def inconsistent_pair(elements):
    """(x, y) with reverse(x) < y for distinct separations, or None."""
    ordered = sort_separations(elements)
    for x in ordered:
        rev = x.reverse()
        for y in ordered:
            if y.same_separation(x):
                continue
            if rev.lt(y):
                return (x, y)
    return None


def is_regular(g, elements):
    return not any(s.a == g.full for s in elements)


def is_profile(elements, k):
    ordered = sort_separations(elements)
    for x in ordered:
        for y in ordered:
            corner = profile_corner(x, y)
            if corner.order < k and corner in elements:
                return False
    return True


def is_principal(g, k, elements):
    for width in range(min(k, g.n + 1)):
        for x in combinations(range(g.n), width):
            mask = sum(1 << v for v in x)
            if not any(Separation(g.full & ~c, c | mask) in elements for c in components(g, mask)):
                return False
    return True


def check_orientation(orientation, family):
    system = orientation.system
    g = system.graph
    elements = orientation.elements
    if not orientation.is_total():
        raise InvalidArgument("orientation does not orient every member exactly once")
    bad_pair = inconsistent_pair(elements)
    violation = find_member(g, elements, family)
    return OrientationFlags(
        consistent=bad_pair is None,
        regular=is_regular(g, elements),
        avoids_F=violation is None,
        profile=bad_pair is None and is_profile(elements, system.k),
        principal=is_principal(g, system.k, elements),
        violation=violation,
        inconsistent_pair=bad_pair,
    )


def is_f_tangle(orientation, family):
    elements = orientation.elements
    return (orientation.is_total() and inconsistent_pair(elements) is None
            and find_member(orientation.system.graph, elements, family) is None)


def find_f_tangles(g, k, family, limit=config.DEFAULT_TANGLE_LIMIT, system=None, require=frozenset()):
    """Consistent orientations of S_k(G) (or ``system``) that avoid ``family``.

    Backtracks over members in system order; choosing x forces every separation
    below x. At most ``limit`` tangles are returned (all when None), in search order.
    """
    system = enumerate_separations(g, k) if system is None else system
    below = system.below
    index = system.index
    found = []
    nodes = 0

    def place(chosen, new):
        added = []
        for y in (new,) + below[new]:
            i = index[y]
            if i in chosen:
                if chosen[i] != y:
                    undo(chosen, added)
                    return None
                continue
            chosen[i] = y
            added.append(y)
        return added

    def undo(chosen, added):
        for y in added:
            del chosen[index[y]]

    def admissible(chosen, added):
        current = frozenset(chosen.values())
        for y in added:
            if find_member(g, current - {y}, family, through=y) is not None:
                return False
        return True

    def search(chosen, position):
        nonlocal nodes
        nodes += 1
        while position < len(system.members) and position in chosen:
            position += 1
        if position == len(system.members):
            found.append(Orientation(system, frozenset(chosen.values())))
            return limit is not None and len(found) >= limit
        for choice in orientation_pair(system.members[position]):
            added = place(chosen, choice)
            if added is None:
                continue
            if admissible(chosen, added) and search(chosen, position + 1):
                return True
            undo(chosen, added)
        return False

    chosen = {}
    start = []
    for s in sort_separations(require):
        if s not in index:
            raise InvalidArgument(f"required separation {s.describe(g)} is not in the system")
        added = place(chosen, s)
        if added is None:
            logger.debug("required separations contradict each other")
            return []
        start.extend(added)
    if admissible(chosen, start):
        search(chosen, 0)
    logger.debug("tangle search over %d members visited %d nodes, found %d", len(system), nodes, len(found))
    return found


@dataclass(frozen=True)
class Distinction:
    separations: tuple
    efficient: tuple
    combinatorially_distinguishable: bool


def distinguishers(tau, tau2):
    seps = tuple(m for m in tau.system if tau.orient(m) != tau2.orient(m))
    if not seps:
        return Distinction((), (), False)
    low = min(m.order for m in seps)
    efficient = tuple(m for m in seps if m.order == low)
    return Distinction(seps, efficient, combinatorially_distinguishable(tau, tau2))


def combinatorially_distinguishable(tau, tau2):
    if tau.elements == tau2.elements:
        return False
    g, k = tau.system.graph, tau.system.k
    if is_principal(g, k, tau.elements) or is_principal(g, k, tau2.elements):
        return True
    for width in range(min(k, g.n + 1)):
        for x in combinations(range(g.n), width):
            mask = sum(1 << v for v in x)
            comps = components(g, mask)
            if all(Separation(c | mask, g.full & ~c) in tau for c in comps) and \
                    any(Separation(g.full & ~c, c | mask) in tau2 for c in comps):
                return True
    return False


def efficiently_distinguishes(sep, tau, tau2):
    d = distinguishers(tau, tau2)
    return any(sep.same_separation(m) for m in d.efficient)


def closely_related(s, orientation, k=None):
    k = orientation.system.k if k is None else k
    if s not in orientation:
        return False
    return all(s.meet(x).order < k for x in orientation.elements)


@dataclass(frozen=True)
class ShiftResult:
    emulates: bool
    shifted: frozenset
    is_star: bool
    in_family: bool = None


def emulates(s, r, system):
    if not r.leq(s):
        return False
    return all(s.join(x) in system for x in system.oriented if r.leq(x))


def shift_star(s, sigma, t):
    return frozenset({s.join(t)} | {s.reverse().meet(x) for x in sigma if x != t})


def emulate_and_shift(s, r, system, sigma, t, family=None):
    sigma = frozenset(sigma)
    if t not in sigma:
        raise InvalidArgument(f"{t.describe()} is not an element of the star")
    if not r.leq(s):
        raise InvalidArgument(f"{s.describe()} does not lie above {r.describe()}")
    g = system.graph
    shifted = shift_star(s, sigma, t)
    in_family = None if family is None else bool(family_member(g, shifted, family))
    return ShiftResult(emulates(s, r, system), shifted, star_violation(g, shifted) is None, in_family)


def above_r(r, sigma):
    """sigma lies in S_{>=r} without r itself."""
    return r not in sigma and all(r.leq(x) or r.leq(x.reverse()) for x in sigma)


def emulates_for(s, r, system, family, stars=None, max_size=3):
    """s emulates r, and shifting any member star above r through an element t >= r stays in ``family``.

    ``stars`` are the member stars to try; by default all members with at most
    ``max_size`` elements.
    """
    if not emulates(s, r, system):
        return False
    g = system.graph
    if stars is None:
        stars = iter_members(g, system.oriented, family, max_size)
    for sigma in stars:
        if not above_r(r, sigma):
            continue
        for t in sigma:
            if r.leq(t) and not family_member(g, shift_star(s, sigma, t), family):
                return False
    return True


@dataclass(frozen=True)
class NicenessReport:
    checked: int
    failures: tuple


def niceness_report(system, family, budget=1000, max_size=3):
    """Shift every member star through every (s, r) with s emulating r, up to ``budget`` shifts."""
    g = system.graph
    checked = 0
    failures = []
    stars = list(iter_members(g, system.oriented, family, max_size))
    for r in system.oriented:
        if r == Separation(g.full, g.full) or system.trivial(r):
            continue
        for s in system.oriented:
            if not emulates(s, r, system):
                continue
            for sigma in stars:
                if not above_r(r, sigma):
                    continue
                for t in sigma:
                    if not r.leq(t):
                        continue
                    checked += 1
                    if not family_member(g, shift_star(s, sigma, t), family):
                        failures.append((s, r, sigma, t))
                    if checked >= budget:
                        return NicenessReport(checked, tuple(failures))
    return NicenessReport(checked, tuple(failures))

