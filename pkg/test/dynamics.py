import unittest
from functools import cache

from parameterized import parameterized

from thurston.complex import EDGE, TILE, VERTEX, CellRef, ComplexTower, flower, local_degree_at
from thurston.dynamics import (
    DepthExhausted,
    PointAddress,
    analyze_critical,
    apply_map,
    cell_address,
    generic_point,
    iterate_map,
    local_degree_along_orbit,
    preimage_tree_sizes,
    preimages,
    pull_back,
    same_point,
    vertex_address,
)
from thurston.rulekit import BLACK, WHITE, generate_basilica, load_bundled_rule


RULES = [("lattes2x2",), ("checkerboard3x3",), ("barycentric",)]


@cache
def tower(name: str) -> ComplexTower:
    return ComplexTower(load_bundled_rule(name), level_cap=8)


class DynamicsTests(unittest.TestCase):
    def test_address_levels_are_checked(self):
        with self.assertRaises(ValueError):
            PointAddress(())
        with self.assertRaises(ValueError):
            PointAddress((CellRef(1, TILE, 0),))
        p = PointAddress((CellRef(0, TILE, 0), CellRef(1, TILE, 3)))
        self.assertEqual(p.depth, 1)
        self.assertTrue(p.is_generic)
        self.assertEqual(str(p), "0,2,0;1,2,3")
        with self.assertRaises(DepthExhausted):
            p.truncate(2)
        with self.assertRaises(DepthExhausted):
            apply_map(tower("lattes2x2"), p.truncate(0))

    def test_same_point_compares_shared_levels(self):
        t = tower("checkerboard3x3")
        p = generic_point(t, 3)
        self.assertTrue(same_point(p, p.truncate(1)))
        q = generic_point(t, 3, color=BLACK)
        self.assertFalse(same_point(p, q))

    @parameterized.expand(RULES)
    def test_generic_preimages(self, name):
        t = tower(name)
        p = generic_point(t, 2, color=WHITE)
        found = preimages(t, p)
        self.assertEqual(len(found), t.d)
        self.assertTrue(all(weight == 1 for _, weight in found))
        for q, _ in found:
            self.assertEqual(q.depth, 3)
            self.assertTrue(q.is_generic)
            self.assertEqual(apply_map(t, q), p)

    @parameterized.expand(RULES)
    def test_vertex_preimages_carry_degree(self, name):
        t = tower(name)
        for j in range(t.m):
            p = vertex_address(t, CellRef(0, VERTEX, j), 2)
            found = preimages(t, p)
            self.assertEqual(sum(weight for _, weight in found), t.d)
            for q, weight in found:
                self.assertTrue(q.is_vertex)
                self.assertEqual(weight, local_degree_along_orbit(t, q, 1))
                self.assertTrue(same_point(apply_map(t, q), p))

    def test_edge_point_preimages(self):
        t = tower("checkerboard3x3")
        p = PointAddress(tuple(t.ancestors(CellRef(2, EDGE, 0))))
        self.assertEqual(p[0].dim, EDGE)
        found = preimages(t, p)
        self.assertEqual(sum(weight for _, weight in found), t.d)
        self.assertTrue(all(q[1].dim != TILE for q, _ in found))

    def test_pull_back_inverts_the_map(self):
        t = tower("barycentric")
        p = generic_point(t, 1, color=BLACK)
        for y in range(t.rule.num_tiles):
            if t.rule.tiles[y].color != BLACK:
                continue
            q = pull_back(t, p, (TILE, y))
            self.assertEqual(q[1], CellRef(1, TILE, y))
            self.assertEqual(apply_map(t, q), p)

    @parameterized.expand(RULES)
    def test_preimage_tree_sizes(self, name):
        t = tower(name)
        self.assertEqual(preimage_tree_sizes(t, generic_point(t), 2), [1, t.d, t.d**2])

    def test_critical_vertices_have_degree(self):
        t = tower("lattes2x2")
        for v, deg in enumerate(t.rule.vertex_degrees):
            p = vertex_address(t, CellRef(1, VERTEX, v), 3)
            self.assertEqual(local_degree_along_orbit(t, p, 1), deg)
            self.assertEqual(p.depth, 3)
            self.assertEqual(p[0].dim, t.level(1).root[VERTEX][v][0])
        with self.assertRaises(DepthExhausted):
            local_degree_along_orbit(t, generic_point(t, 1), 2)

    def test_fixed_corner_is_periodic(self):
        t = tower("barycentric")
        a = vertex_address(t, CellRef(0, VERTEX, 0), 3)
        self.assertTrue(same_point(iterate_map(t, a, 2), a))
        self.assertEqual(local_degree_along_orbit(t, a, 2), 4)

    def test_cell_address_truncates_to_ancestors(self):
        t = tower("lattes2x2")
        cx = t.level(2)
        w = next(
            CellRef(2, TILE, i)
            for i, (root, base) in enumerate(zip(cx.root[TILE], cx.base[TILE]))
            if root[1] == base
        )
        p = cell_address(t, w, 1)
        self.assertEqual(p.cells, tuple(t.ancestors(w))[:2])
        fixed = cell_address(t, w, 4)
        self.assertEqual(fixed.depth, 4)
        self.assertEqual(fixed[2], w)
        self.assertTrue(same_point(iterate_map(t, fixed, 2), fixed))

    def test_critical_report_barycentric(self):
        report = analyze_critical(load_bundled_rule("barycentric"))
        self.assertEqual(report.periodic_critical, ((0, 1),))
        self.assertTrue(report.has_periodic_critical)
        self.assertEqual(report.kappa, 1)
        self.assertEqual(report.degree_excess, 2 * 6 - 2)
        self.assertEqual(report.cycles, ((0,),))

    @parameterized.expand([("lattes2x2",), ("checkerboard3x3",)])
    def test_critical_report_checkerboards(self, name):
        rule = load_bundled_rule(name)
        report = analyze_critical(rule)
        self.assertFalse(report.has_periodic_critical)
        self.assertEqual(report.kappa, 1)
        self.assertEqual(report.degree_excess, 2 * rule.d - 2)
        for j, orbit in report.postcritical_orbits.items():
            self.assertEqual(orbit[0], j)

    def test_critical_report_basilica(self):
        report = analyze_critical(generate_basilica())
        self.assertEqual(report.critical_vertices, ((0, 2), (2, 2)))
        self.assertEqual(report.cycles, ((0, 1), (2,)))
        self.assertEqual(report.periodic_critical, ((0, 2), (2, 1)))
        self.assertTrue(report.has_periodic_critical)
        self.assertEqual(report.kappa, 2)

    @parameterized.expand([(name, n) for (name,) in RULES for n in (1, 2, 3)])
    def test_flowers_give_local_degrees(self, name, n):
        t = tower(name)
        for v in t.level(n).cells(VERTEX):
            cells = flower(t, v)
            self.assertIn(v, cells)
            petals = sum(1 for c in cells if c.dim == TILE)
            self.assertEqual(petals % 2, 0)
            self.assertEqual(petals, 2 * local_degree_at(t, v))
            p = vertex_address(t, v, n)
            self.assertEqual(local_degree_along_orbit(t, p, n), petals // 2)
        with self.assertRaises(ValueError):
            flower(t, CellRef(n, TILE, 0))
