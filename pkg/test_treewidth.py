import unittest
from itertools import permutations

import networkx as nx

from tangleforge.corpus import all_graphs, two_k4
from tangleforge.decompositions import validate_td
from tangleforge.errors import Refusal
from tangleforge.graph import Graph, vset
from tangleforge.treewidth import exact_treewidth, q_size, td_from_order, treewidth_at_most, width_within


def elimination_width(g, order):
    """Largest degree met while eliminating ``order`` with fill-in."""
    h = g.nx_graph.copy()
    width = 0
    for v in order:
        nbrs = list(h.neighbors(v))
        width = max(width, len(nbrs))
        h.add_edges_from((x, y) for i, x in enumerate(nbrs) for y in nbrs[i + 1:])
        h.remove_node(v)
    return width


class TestExactTreewidth(unittest.TestCase):
    def assertTreewidth(self, g, expected):
        result = exact_treewidth(g)
        self.assertEqual(result.tw, expected)
        report = validate_td(g, result.decomposition)
        self.assertTrue(report.valid, msg=report.witness)
        self.assertEqual(report.width, expected)

    def test_named_graphs(self):
        self.assertTreewidth(Graph(3, [(0, 1), (1, 2)]), 1)
        self.assertTreewidth(Graph.from_networkx(nx.complete_graph(4)), 3)
        self.assertTreewidth(Graph.from_networkx(nx.cycle_graph(4)), 2)
        self.assertTreewidth(Graph.from_networkx(nx.cycle_graph(5)), 2)
        self.assertTreewidth(Graph.from_networkx(nx.grid_2d_graph(3, 3)), 3)
        self.assertTreewidth(Graph.from_networkx(nx.petersen_graph()), 4)
        self.assertTreewidth(two_k4(), 3)
        self.assertTreewidth(Graph(4, []), 0)

    def test_empty_graph(self):
        self.assertEqual(exact_treewidth(Graph(0, [])).tw, -1)

    def test_too_many_vertices(self):
        with self.assertRaises(Refusal) as ctx:
            exact_treewidth(Graph.from_networkx(nx.path_graph(17)))
        self.assertEqual(ctx.exception.status, "bound")

    def test_matches_best_elimination_ordering(self):
        for g in all_graphs(4):
            best = min(elimination_width(g, order) for order in permutations(range(g.n)))
            self.assertEqual(exact_treewidth(g).tw, best, msg=repr(g))

    def test_at_most(self):
        c5 = Graph.from_networkx(nx.cycle_graph(5))
        self.assertTrue(treewidth_at_most(c5, 2))
        self.assertFalse(treewidth_at_most(c5, 1))

    def test_width_within_large_graphs(self):
        ladder = Graph.from_networkx(nx.grid_2d_graph(50, 2))
        self.assertEqual(width_within(ladder, 2), 2)
        self.assertEqual(width_within(Graph.from_networkx(nx.path_graph(40)), 1), 1)
        self.assertEqual(width_within(Graph.from_networkx(nx.complete_graph(5)), 2), 4)
        with self.assertRaises(Refusal):
            width_within(Graph.from_networkx(nx.complete_graph(17)), 3)


class TestEliminationOrders(unittest.TestCase):
    def test_q_size(self):
        p3 = Graph(3, [(0, 1), (1, 2)])
        self.assertEqual(q_size(p3, 0, 1), 2)
        self.assertEqual(q_size(p3, vset([0]), 1), 1)
        self.assertEqual(q_size(p3, vset([1]), 0), 1)

    def test_order_gives_valid_decomposition(self):
        c5 = Graph.from_networkx(nx.cycle_graph(5))
        for order in [(0, 1, 2, 3, 4), (2, 0, 4, 1, 3)]:
            td = td_from_order(c5, order)
            report = validate_td(c5, td)
            self.assertTrue(report.valid, msg=report.witness)
            self.assertEqual(report.width, elimination_width(c5, order))

    def test_forest_roots_are_chained(self):
        g = Graph(4, [(0, 1), (2, 3)])
        td = td_from_order(g, (0, 1, 2, 3))
        self.assertTrue(nx.is_tree(td.tree))
        self.assertTrue(validate_td(g, td).valid)


if __name__ == '__main__':
    unittest.main()
