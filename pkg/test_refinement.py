import unittest

import networkx as nx

from tangleforge.corpus import atlas_graphs, two_k4
from tangleforge.decompositions import STree, TreeDecomposition, validate_stree, validate_td
from tangleforge.duality import STREE
from tangleforge.errors import InvalidArgument, Refusal, SoundnessError
from tangleforge.families import pk, tk, tstar, uk, union
from tangleforge.graph import Graph, vset
from tangleforge.orientations import closely_related, find_f_tangles
from tangleforge.refinement import (CLOSELY_RELATED, ROBUST, build_tree_of_tangles, check_glued_stars, check_premise,
                                    corollary_6_3_check, extension_witness, minimize_exclusive_star,
                                    refine_inessential_star, refine_tree_of_tangles, related_profile, robustness_ell)
from tangleforge.separations import Separation, enumerate_separations

A = vset([0, 1, 2, 3])
B = vset([2, 3, 4, 5])


def broom():
    """Centre 0 with fourteen leaves and one more edge 0-15."""
    return Graph(16, [(0, v) for v in range(1, 16)])


class TestExtensionWitness(unittest.TestCase):
    def test_robustness_ell(self):
        self.assertEqual(robustness_ell(3, 6), 42)
        self.assertEqual(robustness_ell(2, 0), 4)

    def test_complete_graph_is_robust(self):
        k5 = Graph.from_networkx(nx.complete_graph(5))
        s = Separation(k5.full, vset([3, 4]))
        witness = extension_witness(k5, 3, uk(3), s, 3)
        self.assertEqual(witness.mode, ROBUST)

    def test_two_k4_falls_back_to_a_profile(self):
        g = two_k4()
        s = Separation(A, B)
        witness = extension_witness(g, 3, tstar(3), s, robustness_ell(3, 6))
        self.assertEqual(witness.mode, CLOSELY_RELATED)
        self.assertIn(s.reverse(), witness.profile)
        self.assertIsNotNone(related_profile(g, 3, tstar(3), s))

    def test_related_profile_matches_filtered_search(self):
        for g in atlas_graphs(4):
            system = enumerate_separations(g, 2)
            for s in system.oriented:
                profile = related_profile(g, 2, tstar(2), s)
                profiles = find_f_tangles(g, 2, union(tstar(2), pk(2)), limit=None, require={s.reverse()})
                expected = any(closely_related(s.reverse(), p, 2) for p in profiles)
                self.assertEqual(profile is not None, expected, msg=(g.edges, s))
                if profile is not None:
                    self.assertTrue(closely_related(s.reverse(), profile, 2))



class TestInessentialStar(unittest.TestCase):
    def setUp(self):
        self.g = two_k4()
        self.ab = Separation(A, B)

    def test_both_sides_give_a_tree(self):
        sigma = {self.ab, self.ab.reverse()}
        out = refine_inessential_star(self.g, 3, tstar(3), sigma)
        self.assertEqual(out.verdict, STREE)
        self.assertEqual(out.restricted_size, 5)
        self.assertEqual(out.restricted_bound, 16)
        self.assertTrue(frozenset(sigma) <= out.stree.leaf_separations())
        self.assertTrue(validate_stree(self.g, out.stree).valid)

    def test_one_side_extends_a_tangle(self):
        out = refine_inessential_star(self.g, 3, tstar(3), {self.ab})
        self.assertEqual(out.verdict, "tangle")
        expected = find_f_tangles(self.g, 3, tstar(3), require={self.ab})[0]
        self.assertEqual(out.tangle.elements, expected.elements)

    def test_arguments(self):
        with self.assertRaises(InvalidArgument):
            refine_inessential_star(self.g, 3, tk(3), {self.ab})
        with self.assertRaises(InvalidArgument):
            refine_inessential_star(self.g, 2, tstar(2), {self.ab})


class TestTreeOfTangles(unittest.TestCase):
    def test_two_k4(self):
        g = two_k4()
        out = build_tree_of_tangles(g, 3)
        self.assertEqual(len(out.tangles), 2)
        self.assertEqual(out.decomposition.bags, {0: B, 1: A})
        self.assertEqual(out.nested, (Separation(A, B).unoriented(),))

    def test_single_tangle(self):
        k4 = Graph.from_networkx(nx.complete_graph(4))
        out = build_tree_of_tangles(k4, 3)
        self.assertEqual(out.decomposition.bags, {0: k4.full})

    def test_too_large(self):
        with self.assertRaises(Refusal):
            build_tree_of_tangles(Graph.from_networkx(nx.path_graph(10)), 2)


class TestExclusiveStar(unittest.TestCase):
    def test_clique_side(self):
        g = two_k4()
        tangles = find_f_tangles(g, 3, tstar(3), limit=None)
        ba = Separation(B, A)
        home = next(t for t in tangles if ba in t)
        found = minimize_exclusive_star(g, 3, home, {ba}, tangles)
        self.assertEqual(found.star, frozenset({ba}))
        self.assertEqual(found.interior_size, 4)
        self.assertEqual(found.global_minimum, 4)

    def test_not_exclusive(self):
        g = two_k4()
        tangles = find_f_tangles(g, 3, tstar(3), limit=None)
        with self.assertRaises(Refusal):
            minimize_exclusive_star(g, 3, tangles[0], frozenset(), tangles)


class TestRefineTreeOfTangles(unittest.TestCase):
    def test_two_k4(self):
        g = two_k4()
        td = build_tree_of_tangles(g, 3).decomposition
        out = refine_tree_of_tangles(g, 3, tstar(3), td)
        self.assertEqual(sorted(found.interior_size for found in out.essential.values()), [4, 4])
        report = validate_td(g, out.decomposition, other=td)
        self.assertTrue(report.valid)
        self.assertTrue(report.refines_other)

    def test_complete_graph(self):
        k4 = Graph.from_networkx(nx.complete_graph(4))
        td = build_tree_of_tangles(k4, 3).decomposition
        out = refine_tree_of_tangles(k4, 3, tstar(3), td)
        self.assertEqual(out.essential[0].star, frozenset())
        self.assertEqual(out.essential[0].interior_size, 4)

    def test_path(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        td = build_tree_of_tangles(p3, 2).decomposition
        self.assertEqual(sorted(td.bags.values()), sorted([vset([0, 1]), vset([1, 2])]))
        out = refine_tree_of_tangles(p3, 2, tstar(2), td)
        self.assertTrue(validate_td(p3, out.decomposition, other=td).refines_other)
        self.assertEqual(sorted(out.decomposition.bags.values()), sorted(td.bags.values()))

    def test_premise_needs_distinguishing_edges(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        tangles = tuple(find_f_tangles(p3, 2, tstar(2), limit=None))
        coarse = TreeDecomposition.build({0: p3.full}, [])
        with self.assertRaises(Refusal):
            check_premise(p3, 2, coarse, tangles)

    def test_glued_singletons_need_a_source(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        s = Separation(vset([0, 1]), vset([1, 2]))
        st = STree.build([0, 1], [(0, 1, s)])
        with self.assertRaises(SoundnessError):
            check_glued_stars(p3, st, tstar(2))
        with self.assertRaises(SoundnessError):
            check_glued_stars(p3, st, tstar(2), sigmas=[{Separation(vset([0]), vset([0, 1, 2]))}])
        check_glued_stars(p3, st, tstar(2), sigmas=[{s}])
        check_glued_stars(p3, st, tstar(2), essential_stars=[{s.reverse()}])



class TestTorso(unittest.TestCase):
    def test_broom(self):
        g = broom()
        sigma = {Separation(vset(range(15)), vset([0, 15]))}
        out = corollary_6_3_check(g, 1, sigma)
        self.assertEqual(out.ell, 14)
        self.assertLessEqual(out.width, 1)
        self.assertEqual(out.torso_vertices, (0, 15))

    def test_ladder_column(self):
        ladder = Graph.from_networkx(nx.grid_2d_graph(50, 2))
        column = Separation(vset(range(96)), vset(range(94, 100)))
        out = corollary_6_3_check(ladder, 2, {column})
        self.assertEqual(out.ell, 39)
        self.assertLessEqual(out.width, 2)
        self.assertEqual(out.torso_vertices, tuple(range(94, 100)))

    def test_short_path_refused(self):
        p5 = Graph.from_networkx(nx.path_graph(5))
        with self.assertRaises(Refusal):
            corollary_6_3_check(p5, 1, {Separation(vset([0, 1, 2]), vset([2, 3, 4]))})

    def test_treewidth_too_large(self):
        k4 = Graph.from_networkx(nx.complete_graph(4))
        with self.assertRaises(Refusal):
            corollary_6_3_check(k4, 1, set())


if __name__ == '__main__':
    unittest.main()
