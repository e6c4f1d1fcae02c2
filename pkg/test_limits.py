import unittest

from tangleforge.errors import InvalidArgument, Refusal
from tangleforge.graph import size, vset
from tangleforge.limits import (_column_sequence, block_orientation, edgeless_tangle_count, end_degree_proxy,
                                example_5_4_chain, example_5_4_family, family, natural_sequence, proxy_orientation,
                                sequence_report, truncate)
from tangleforge.orientations import inconsistent_pair, is_f_tangle
from tangleforge.separations import Separation, enumerate_separations


class TestTruncations(unittest.TestCase):
    def test_sizes(self):
        cases = [("grid", 5, {"rows": 3}, 15, 22), ("ray_clique", 10, {}, 15, 20), ("example_5_4", 6, {}, 24, 116)]
        for name, n, params, vertices, edges in cases:
            t = truncate(name, n, **params)
            self.assertEqual(t.graph.n, vertices, msg=name)
            self.assertEqual(len(t.graph.edges), edges, msg=name)

    def test_ray_labels(self):
        t = truncate("ray_clique", 3)
        self.assertEqual(t.graph.label(0), "0")
        self.assertEqual(t.graph.label(4), "k1")
        self.assertEqual(t.boundary, vset([3]))

    def test_unknown_family(self):
        with self.assertRaises(InvalidArgument):
            family("ladder")
        with self.assertRaises(InvalidArgument):
            truncate("ray_clique", 1)


class TestEndDegreeProxy(unittest.TestCase):
    def test_disjoint_paths(self):
        self.assertEqual(end_degree_proxy("grid", 5, rows=3).paths, 3)
        self.assertEqual(end_degree_proxy("grid", 4, rows=2).paths, 2)
        ray = end_degree_proxy("ray_clique", 10)
        self.assertEqual(ray.paths, 1)
        self.assertTrue(ray.passed)
        columns = end_degree_proxy("example_5_4", 5)
        self.assertEqual(columns.paths, 4)
        self.assertEqual(columns.declared_degree, 4)

    def test_disconnected_truncation(self):
        with self.assertRaises(InvalidArgument):
            end_degree_proxy("edgeless", 3)

    def test_proxy_orientation(self):
        t = truncate("grid", 3, rows=2)
        for k in (2, 3):
            proxy = proxy_orientation(t, k)
            self.assertTrue(proxy.consistent, msg=f"k={k}")
            self.assertTrue(proxy.avoids_tk, msg=f"k={k}")
            self.assertGreater(proxy.oriented, 0)
        self.assertEqual(end_degree_proxy("grid", 3, k=2, rows=2).proxy, proxy_orientation(t, 2))


class TestSequences(unittest.TestCase):
    def test_ray(self):
        report = sequence_report("ray_clique", 8)
        self.assertTrue(report.valid)
        self.assertTrue(report.increasing)
        self.assertEqual(report.length, 7)
        self.assertEqual(report.orders, (2,) + (3,) * 6)
        self.assertEqual(size(report.core), 4)
        self.assertTrue(report.core_persists)
        self.assertFalse(report.empty)

    def test_columns(self):
        report = sequence_report("example_5_4", 5)
        self.assertTrue(report.valid and report.increasing)
        self.assertEqual(set(report.orders), {4})
        self.assertEqual(report.intersection, 0)
        self.assertTrue(report.empty)

    def test_invalid_label(self):
        t = truncate("ray_clique", 4)
        bad = Separation(vset([0]), t.graph.full & ~vset([0]))
        report = sequence_report("ray_clique", 4, sequence=[bad])
        self.assertFalse(report.valid)
        self.assertEqual(report.failure, "label 0 is not a separation")

    def test_no_natural_sequence(self):
        t = truncate("grid", 3)
        with self.assertRaises(InvalidArgument):
            natural_sequence(family("grid"), t)

    def test_chain(self):
        chain = example_5_4_chain(3)
        self.assertEqual(chain.labels, 2)
        self.assertEqual(chain.avoiding, (1,))
        self.assertEqual(chain.first_violation, {0: 1})
        self.assertTrue(chain.boundary_ward)

    def test_block_orientation_is_consistent(self):
        t = truncate("example_5_4", 3)
        system = enumerate_separations(t.graph, 5)
        tau = block_orientation(system, vset(range(4, 12)))
        self.assertTrue(tau.is_total())
        self.assertIsNone(inconsistent_pair(tau.elements))
        labels = _column_sequence(t)[:2]
        self.assertTrue(is_f_tangle(tau, example_5_4_family(t.graph, 5, system, labels)))
        self.assertFalse(is_f_tangle(block_orientation(system, vset(range(8))),
                                     example_5_4_family(t.graph, 5, system, labels)))

    def test_chain_needs_two_columns(self):
        with self.assertRaises(InvalidArgument):
            example_5_4_chain(1)
        with self.assertRaises(Refusal):
            example_5_4_chain(5)


class TestEdgeless(unittest.TestCase):
    def test_one_tangle_per_vertex(self):
        for m in (1, 2, 4):
            self.assertEqual(edgeless_tangle_count(m), m)
        with self.assertRaises(InvalidArgument):
            edgeless_tangle_count(3, k=2)


if __name__ == '__main__':
    unittest.main()
