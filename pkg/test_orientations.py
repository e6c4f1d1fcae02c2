import unittest

import networkx as nx

from tangleforge.corpus import atlas_graphs
from tangleforge.errors import InvalidArgument
from tangleforge.families import find_member, tk, tstar, uk
from tangleforge.graph import Graph, vset
from tangleforge.orientations import (Orientation, check_orientation, closely_related, distinguishers,
                                      emulate_and_shift, emulates, find_f_tangles, inconsistent_pair, is_f_tangle,
                                      niceness_report, shift_star)
from tangleforge.separations import Separation, enumerate_separations, orientation_pair


def sep(a, b):
    return Separation(vset(a), vset(b))


def naive_tangles(g, k, family):
    """Orientations grown member by member with pairwise checks only; the oracle for the backtracking search."""
    system = enumerate_separations(g, k)
    out = set()

    def extend(chosen, i):
        if i == len(system.members):
            out.add(chosen)
            return
        for x in orientation_pair(system.members[i]):
            if inconsistent_pair(chosen | {x}) is None and find_member(g, chosen, family, through=x) is None:
                extend(chosen | {x}, i + 1)

    extend(frozenset(), 0)
    return out


class TestOrientation(unittest.TestCase):
    def setUp(self):
        self.p3 = Graph(3, [(0, 1), (1, 2)])
        self.k3 = Graph.from_networkx(nx.complete_graph(3))

    def test_k3_toward_v(self):
        system = enumerate_separations(self.k3, 2)
        elements = frozenset(m if m.b == self.k3.full else m.reverse() for m in system)
        flags = check_orientation(Orientation(system, elements), tk(2))
        self.assertTrue(flags.consistent)
        self.assertTrue(flags.regular)
        self.assertTrue(flags.avoids_F)
        self.assertTrue(flags.profile)
        self.assertTrue(flags.principal)

    def test_whole_graph_small_side_is_covered(self):
        system = enumerate_separations(self.k3, 2)
        flipped = Separation(self.k3.full, vset([0]))
        elements = frozenset(flipped if m.same_separation(flipped) else orientation_pair(m)[0] for m in system)
        flags = check_orientation(Orientation(system, elements), tk(2))
        self.assertFalse(flags.avoids_F)
        self.assertIn(flipped, flags.violation)

    def test_partial_orientation_rejected(self):
        system = enumerate_separations(self.p3, 2)
        with self.assertRaises(InvalidArgument):
            check_orientation(Orientation(system, frozenset()), tk(2))

    def test_consistent_pair_scan(self):
        elements = {sep([1, 2], [0, 1]), sep([0], [0, 1, 2]), sep([2], [0, 1, 2]), sep([1], [0, 1, 2])}
        self.assertIsNone(inconsistent_pair(elements))
        self.assertIsNotNone(inconsistent_pair({sep([0, 1, 2], [0]), sep([0, 1], [1, 2])}))


class TestFindTangles(unittest.TestCase):
    def test_counts(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        k3 = Graph.from_networkx(nx.complete_graph(3))
        self.assertEqual(len(find_f_tangles(k3, 2, tk(2), limit=None)), 1)
        self.assertEqual(len(find_f_tangles(p3, 2, tk(2), limit=None)), 2)
        self.assertEqual(len(find_f_tangles(k3, 3, tk(3), limit=None)), 0)
        self.assertEqual(len(find_f_tangles(p3, 2, tstar(2), limit=None)), 2)

    def test_require(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        found = find_f_tangles(p3, 2, tk(2), limit=None, require={sep([0, 1], [1, 2])})
        self.assertEqual(len(found), 1)
        self.assertIn(sep([0, 1], [1, 2]), found[0])

    def test_limit(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        self.assertEqual(len(find_f_tangles(p3, 2, tk(2), limit=1)), 1)

    def test_matches_exhaustive_enumeration(self):
        for g in atlas_graphs(5):
            for k in (1, 2, 3, 4):
                families = (tstar(k), uk(k)) if g.n == 5 else (tk(k), tstar(k), uk(k))
                for family in families:
                    found = {o.elements for o in find_f_tangles(g, k, family, limit=None)}
                    self.assertEqual(found, naive_tangles(g, k, family), msg=f"{g!r} k={k} {family.label}")

    def test_conflicting_forced_choice_is_rolled_back(self):
        g = Graph(4, [(0, 1)])
        found = find_f_tangles(g, 2, tstar(2), limit=None)
        self.assertGreater(len(found), 0)
        self.assertTrue(all(is_f_tangle(o, tstar(2)) for o in found))
        self.assertEqual({o.elements for o in found}, naive_tangles(g, 2, tstar(2)))

    def test_tangles_are_regular_principal_profiles(self):
        for g in atlas_graphs(4):
            for k in (1, 2, 3):
                for tangle in find_f_tangles(g, k, tk(k), limit=None):
                    flags = check_orientation(tangle, tk(k))
                    self.assertTrue(flags.consistent and flags.avoids_F, msg=f"{g!r} k={k}")
                    self.assertTrue(flags.regular, msg=f"{g!r} k={k}")
                    self.assertTrue(flags.profile, msg=f"{g!r} k={k}")
                    self.assertTrue(flags.principal, msg=f"{g!r} k={k}")


class TestDistinguishers(unittest.TestCase):
    def test_p3_tangles(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        a, b = find_f_tangles(p3, 2, tk(2), limit=None)
        d = distinguishers(a, b)
        self.assertEqual(len(d.efficient), 1)
        self.assertTrue(d.efficient[0].same_separation(sep([0, 1], [1, 2])))
        self.assertTrue(d.combinatorially_distinguishable)

    def test_identical(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        a = find_f_tangles(p3, 2, tk(2), limit=1)[0]
        d = distinguishers(a, a)
        self.assertEqual(d.separations, ())
        self.assertFalse(d.combinatorially_distinguishable)


class TestCloselyRelated(unittest.TestCase):
    def test_not_in_orientation(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        tau = find_f_tangles(p3, 2, tk(2), require={sep([0, 1], [1, 2])})[0]
        self.assertFalse(closely_related(sep([1, 2], [0, 1]), tau))
        self.assertTrue(closely_related(sep([0, 1], [1, 2]), tau))


class TestShifting(unittest.TestCase):
    def setUp(self):
        self.p3 = Graph(3, [(0, 1), (1, 2)])
        self.system = enumerate_separations(self.p3, 2)

    def test_self_emulation_leaves_stars_alone(self):
        r = sep([0], [0, 1, 2])
        sigma = frozenset({sep([1, 2], [0, 1]), sep([0], [0, 1, 2])})
        self.assertTrue(emulates(r, r, self.system))
        self.assertEqual(shift_star(r, sigma, sep([0], [0, 1, 2])), sigma)

    def test_shift_arguments(self):
        r = sep([0], [0, 1, 2])
        s = sep([0, 1], [1, 2])
        with self.assertRaises(InvalidArgument):
            emulate_and_shift(s, r, self.system, {r}, sep([2], [0, 1, 2]))
        with self.assertRaises(InvalidArgument):
            emulate_and_shift(r, s, self.system, {r}, r)
        result = emulate_and_shift(s, r, self.system, {r}, r, tstar(2))
        self.assertEqual(result.shifted, frozenset({s}))
        self.assertTrue(result.is_star)

    def test_tstar_is_nice_on_p3(self):
        report = niceness_report(self.system, tstar(2))
        self.assertGreater(report.checked, 0)
        self.assertEqual(report.failures, ())


if __name__ == '__main__':
    unittest.main()
