"""Tangle-tree duality on finite separation systems.

An oriented separation s "hangs" if some star of the family contains s and
every other element t of that star has a hanging inverse. The least fixed
point of this rule is computed round by round; a separation hanging in both
orientations gives an S-tree, and otherwise the tangle search has to succeed.
Both answers are computed and their exclusiveness is asserted.
"""
import logging
from dataclasses import dataclass, field
from itertools import count

from tangleforge import config
from tangleforge.decompositions import STree, contract_nested_bags, td_to_stree, validate_stree
from tangleforge.errors import InvalidArgument, Refusal, SoundnessError
from tangleforge.families import (AUGMENTED, EXPLICIT, TSTAR, UK, UNION, extend_to_member, family_member,
                                  iter_members, uk)
from tangleforge.orientations import emulates_for, find_f_tangles, is_f_tangle
from tangleforge.separations import Separation, enumerate_separations, sort_separations
from tangleforge.treewidth import exact_treewidth

logger = logging.getLogger(__name__)

TANGLE = "tangle"
STREE = "stree"


def check_supported(family):
    if family.kind in (TSTAR, UK, EXPLICIT):
        return
    if family.kind == AUGMENTED:
        return check_supported(family.base)
    if family.kind == UNION:
        for part in family.parts:
            check_supported(part)
        return
    raise InvalidArgument(f"duality is not available for the {family.label} family")


@dataclass(frozen=True)
class HangResult:
    witnesses: dict
    rounds: int

    @property
    def hang_set(self):
        return tuple(sort_separations(self.witnesses))

    def both_ways(self, system):
        for m in system:
            rev = m.reverse()
            if m in self.witnesses and rev in self.witnesses:
                return m
        return None


def hang(g, system, family):
    """Least fixed point; witnesses map each hanging s to (round, star through s)."""
    witnesses = {}
    rounds = 0
    while True:
        rounds += 1
        candidates = frozenset(t.reverse() for t in witnesses)
        fresh = {}
        for s in system.oriented:
            if s in witnesses:
                continue
            star = extend_to_member(g, s, candidates, family)
            if star is not None:
                fresh[s] = (rounds, star)
        if not fresh:
            break
        witnesses.update(fresh)
    logger.debug("hang fixed point: %d of %d oriented separations after %d rounds",
                  len(witnesses), len(system.oriented), rounds)
    return HangResult(witnesses, rounds)


def is_fixed_point(g, system, family, hang_set):
    hang_set = frozenset(hang_set)
    candidates = frozenset(t.reverse() for t in hang_set)
    return all(extend_to_member(g, s, candidates, family) is None
               for s in system.oriented if s not in hang_set)


def _grow(s, witnesses, nodes, labelled):
    """Subtree below an edge labelled s; its root star is the witness of s."""
    node = next(nodes)
    _, star = witnesses[s]
    for t in sort_separations(star - {s}):
        child = _grow(t.reverse(), witnesses, nodes, labelled)
        labelled.append((child, node, t))
    return node


def assemble_stree(g, system, family, result):
    if family_member(g, frozenset(), family):
        return STree.single_node()
    s = result.both_ways(system)
    if s is None:
        return None
    nodes = count()
    labelled = []
    u = _grow(s, result.witnesses, nodes, labelled)
    v = _grow(s.reverse(), result.witnesses, nodes, labelled)
    labelled.append((v, u, s))
    return STree.build(range(next(nodes)), labelled)


@dataclass(frozen=True)
class DualityCertificate:
    verdict: str
    tangle: object = None
    stree: STree = None
    hang_set: tuple = ()
    provenance: dict = field(default_factory=dict)


def duality(g, k, family, system=None):
    """Exactly one of an F-tangle of the system and an S-tree over F."""
    check_supported(family)
    system = enumerate_separations(g, k) if system is None else system
    result = hang(g, system, family)
    stree = assemble_stree(g, system, family, result)
    tangles = find_f_tangles(g, k, family, limit=1, system=system)
    provenance = {"engine": "hang-fixed-point+backtracking", "rounds": result.rounds,
                  "family": family.label, "k": k, "members": len(system)}
    if stree is not None and tangles:
        raise SoundnessError(f"both an S-tree and a tangle exist for {family.label} at k={k}")
    if stree is None and not tangles:
        raise SoundnessError(f"neither an S-tree nor a tangle exists for {family.label} at k={k}")
    if stree is not None:
        report = validate_stree(g, stree, family)
        if not (report.valid and report.over_F):
            raise SoundnessError("assembled S-tree does not re-validate")
        logger.info("k=%d %s: S-tree with %d nodes", k, family.label, stree.tree.number_of_nodes())
        return DualityCertificate(STREE, stree=stree, hang_set=result.hang_set, provenance=provenance)
    tangle = tangles[0]
    if not is_f_tangle(tangle, family):
        raise SoundnessError("tangle found by the search does not re-validate")
    logger.info("k=%d %s: tangle", k, family.label)
    return DualityCertificate(TANGLE, tangle=tangle, hang_set=result.hang_set, provenance=provenance)


@dataclass(frozen=True)
class WidthTree:
    stree: STree
    decomposition: object
    tw: int


def uk_tree_via_treewidth(g, k):
    result = exact_treewidth(g)
    if result.tw > k - 2:
        raise Refusal(f"treewidth {result.tw} exceeds {k - 2}", status="impossible",
                      details={"tw": result.tw, "k": k})
    td = contract_nested_bags(result.decomposition)
    stree = td_to_stree(g, td, k)
    family = uk(k)
    report = validate_stree(g, stree, family)
    if not (report.valid and report.over_F):
        raise SoundnessError("tree-decomposition of small width does not give an S-tree over U_k")
    if duality(g, k, family).verdict != STREE:
        raise SoundnessError(f"treewidth {result.tw} <= {k - 2} but a U_{k}-tangle exists")
    return WidthTree(stree, td, result.tw)


@dataclass(frozen=True)
class SeparabilityReport:
    pairs: int
    separable: bool
    witnesses: tuple
    failures: tuple
    exhausted_budget: bool


def check_f_separable(system, family, sample_budget=config.DEFAULT_SEPARABILITY_BUDGET, max_size=3):
    """For pairs r <= r' of non-trivial members, find s with s emulating r and reverse(s) emulating reverse(r')."""
    g = system.graph
    full = Separation(g.full, g.full)
    stars = list(iter_members(g, system.oriented, family, max_size))
    eligible = [r for r in system.oriented
                if r != full and not system.trivial(r) and not family_member(g, frozenset((r,)), family)]
    witnesses = []
    failures = []
    pairs = 0
    for r in eligible:
        for r2 in eligible:
            if not r.leq(r2):
                continue
            if pairs >= sample_budget:
                return SeparabilityReport(pairs, not failures, tuple(witnesses), tuple(failures), True)
            pairs += 1
            between = sorted((s for s in system.oriented if r.leq(s) and s.leq(r2)), key=Separation.key)
            found = next((s for s in between
                          if emulates_for(s, r, system, family, stars)
                          and emulates_for(s.reverse(), r2.reverse(), system, family, stars)), None)
            if found is None:
                failures.append((r, r2))
            else:
                witnesses.append((r, r2, found))
    logger.debug("separability: %d pairs, %d failures", pairs, len(failures))
    return SeparabilityReport(pairs, not failures, tuple(witnesses), tuple(failures), False)
