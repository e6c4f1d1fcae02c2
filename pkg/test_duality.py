import unittest

import networkx as nx

from tangleforge.corpus import atlas_graphs
from tangleforge.decompositions import stree_to_td, validate_stree, validate_td
from tangleforge.duality import (STREE, TANGLE, check_f_separable, check_supported, duality, hang, is_fixed_point,
                                 uk_tree_via_treewidth)
from tangleforge.errors import InvalidArgument, Refusal
from tangleforge.families import augmented, pk, tk, tstar, uk
from tangleforge.graph import Graph, size, vset
from tangleforge.orientations import is_f_tangle
from tangleforge.separations import Separation, enumerate_separations
from tangleforge.treewidth import exact_treewidth


class TestDuality(unittest.TestCase):
    def setUp(self):
        self.p3 = Graph(3, [(0, 1), (1, 2)])
        self.k4 = Graph.from_networkx(nx.complete_graph(4))

    def test_path_has_a_tangle(self):
        cert = duality(self.p3, 2, tstar(2))
        self.assertEqual(cert.verdict, TANGLE)
        self.assertIsNone(cert.stree)
        self.assertTrue(is_f_tangle(cert.tangle, tstar(2)))

    def test_path_has_a_uk_tree(self):
        cert = duality(self.p3, 3, uk(3))
        self.assertEqual(cert.verdict, STREE)
        report = validate_stree(self.p3, cert.stree, uk(3))
        self.assertTrue(report.valid and report.over_F)
        self.assertTrue(validate_td(self.p3, stree_to_td(self.p3, cert.stree)).valid)

    def test_complete_graph_at_order_four(self):
        cert = duality(self.k4, 4, tstar(4))
        self.assertEqual(cert.verdict, STREE)
        self.assertTrue(validate_stree(self.k4, cert.stree, tstar(4)).over_F)
        self.assertEqual(duality(self.k4, 3, tstar(3)).verdict, TANGLE)

    def test_provenance(self):
        cert = duality(self.p3, 2, uk(2))
        self.assertEqual(cert.provenance["members"], 5)
        self.assertEqual(cert.provenance["family"], "uk")

    def test_unsupported_family(self):
        with self.assertRaises(InvalidArgument):
            check_supported(tk(2))
        with self.assertRaises(InvalidArgument):
            duality(self.p3, 2, pk(2))
        check_supported(augmented(uk(2), set()))

    def test_uk_verdict_follows_treewidth(self):
        for g in atlas_graphs(5):
            tw = exact_treewidth(g).tw
            for k in (1, 2, 3, 4):
                cert = duality(g, k, uk(k))
                self.assertEqual(cert.verdict == STREE, tw <= k - 2, msg=f"{g!r} k={k}")

    def test_exact_on_small_graphs(self):
        for g in atlas_graphs(5):
            for k in (1, 2, 3, 4):
                for family in (tstar(k), uk(k)):
                    cert = duality(g, k, family)
                    if cert.verdict == TANGLE:
                        self.assertTrue(is_f_tangle(cert.tangle, family), msg=f"{g!r} k={k} {family.label}")
                    else:
                        report = validate_stree(g, cert.stree, family)
                        self.assertTrue(report.valid and report.over_F, msg=f"{g!r} k={k} {family.label}")

    def test_one_edge_and_two_isolated_vertices(self):
        g = Graph(4, [(0, 1)])
        cert = duality(g, 2, tstar(2))
        self.assertEqual(cert.verdict, TANGLE)
        self.assertTrue(is_f_tangle(cert.tangle, tstar(2)))

    def test_star_trees_have_small_bags_and_degree(self):
        for g in atlas_graphs(5):
            for k in (1, 2, 3, 4):
                cert = duality(g, k, tstar(k))
                if cert.verdict != STREE:
                    continue
                self.assertLessEqual(max((d for _, d in cert.stree.tree.degree), default=0), 3, msg=f"{g!r} k={k}")
                td = stree_to_td(g, cert.stree)
                self.assertTrue(all(size(bag) <= 3 * k - 3 for bag in td.bags.values()), msg=f"{g!r} k={k}")


class TestHang(unittest.TestCase):
    def test_fixed_point(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        system = enumerate_separations(p3, 2)
        result = hang(p3, system, tstar(2))
        self.assertTrue(is_fixed_point(p3, system, tstar(2), result.hang_set))
        self.assertFalse(is_fixed_point(p3, system, tstar(2), ()))
        self.assertIn(Separation(p3.full, vset([0])), result.witnesses)
        self.assertIsNone(result.both_ways(system))


class TestWidthTree(unittest.TestCase):
    def test_path(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        out = uk_tree_via_treewidth(p3, 3)
        self.assertEqual(out.tw, 1)
        self.assertTrue(validate_stree(p3, out.stree, uk(3)).over_F)

    def test_refusals(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        with self.assertRaises(Refusal) as ctx:
            uk_tree_via_treewidth(p3, 2)
        self.assertEqual(ctx.exception.status, "impossible")
        with self.assertRaises(Refusal):
            uk_tree_via_treewidth(Graph(4, []), 1)


class TestSeparability(unittest.TestCase):
    def test_tstar_on_path(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        report = check_f_separable(enumerate_separations(p3, 2), tstar(2))
        self.assertGreater(report.pairs, 0)
        self.assertTrue(report.separable)
        self.assertFalse(report.exhausted_budget)

    def test_budget(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        report = check_f_separable(enumerate_separations(p3, 2), tstar(2), sample_budget=0)
        self.assertTrue(report.exhausted_budget)


if __name__ == '__main__':
    unittest.main()
