import unittest
from functools import cache
from itertools import product

from parameterized import parameterized

from thurston.complex import (
    EDGE,
    TILE,
    VERTEX,
    CellComplex,
    CellRef,
    ComplexTower,
    LevelUnavailable,
    check_complex,
    count_white_tiles_in,
    cover_edge,
    cover_growth,
    find_expansion_level,
    interior_contains,
    iterate_rule,
    joins_opposite_sides,
    local_degree_at,
    root_class_counts,
    tile_class_counts,
)
from thurston.rulekit import (
    generate_checkerboard,
    generate_quarter_turn,
    load_bundled_rule,
    rule_stats,
    validate_rule,
)


@cache
def tower(name: str) -> ComplexTower:
    return ComplexTower(load_bundled_rule(name), level_cap=8)


count_params = (
    [("lattes2x2", n) for n in range(1, 5)]
    + [("checkerboard3x3", n) for n in range(1, 3)]
    + [("barycentric", n) for n in range(1, 4)]
)


class ComplexTests(unittest.TestCase):
    @parameterized.expand(count_params)
    def test_cell_counts(self, name, n):
        t = tower(name)
        cx = t.level(n)
        self.assertEqual(cx.num_tiles, 2 * t.d**n)
        self.assertEqual(cx.num_edges, t.m * t.d**n)
        self.assertEqual(cx.euler_characteristic(), 2)
        self.assertEqual(check_complex(cx, t.level(n - 1), t.d), [])

    def test_lattes_level_counts(self):
        t = tower("lattes2x2")
        self.assertEqual(
            (t.level(1).num_vertices, t.level(1).num_edges, t.level(1).num_tiles), (10, 16, 8)
        )
        self.assertEqual(
            (t.level(3).num_vertices, t.level(3).num_edges, t.level(3).num_tiles), (130, 256, 128)
        )

    @parameterized.expand([("lattes2x2",), ("checkerboard3x3",), ("barycentric",)])
    def test_level_one_reproduces_rule(self, name):
        t = tower(name)
        cx = t.level(1)
        rule = t.rule
        self.assertEqual(tile_class_counts(cx), rule_stats(rule).class_counts())
        self.assertEqual(cx.num_vertices, rule.num_vertices)
        for v in range(cx.num_vertices):
            self.assertEqual(cx.local_degree(v), local_degree_at(t, CellRef(1, VERTEX, v)))
        self.assertEqual(
            sorted(cx.local_degree(v) for v in range(cx.num_vertices)), sorted(rule.vertex_degrees)
        )

    def test_iterate_classes(self):
        t = tower("lattes2x2")
        self.assertEqual(root_class_counts(t.level(2)), {"ww": 8, "wb": 8, "bw": 8, "bb": 8})
        self.assertEqual(tile_class_counts(t.level(2)), root_class_counts(t.level(2)))
        iterate = iterate_rule(t.rule, 2, tower=t)
        self.assertTrue(validate_rule(iterate).ok)
        self.assertEqual(iterate.d, 16)
        self.assertEqual(rule_stats(iterate).class_counts(), root_class_counts(t.level(2)))
        self.assertEqual(ComplexTower(iterate, level_cap=1).level(1).num_tiles, 32)

    @parameterized.expand(
        [
            ("lattes2x2", 0, 2, 8),
            ("checkerboard3x3", 0, 2, 41),
            ("checkerboard3x3", 1, 2, 40),
            ("checkerboard3x3", 0, 3, 365),
        ]
    )
    def test_white_tiles_in_zero_tile(self, name, color, i, expected):
        self.assertEqual(count_white_tiles_in(tower(name), CellRef(0, TILE, color), i), expected)

    def test_white_tiles_in_finer_tile(self):
        t = tower("checkerboard3x3")
        total = 0
        for tile in t.level(1).cells(TILE):
            total += count_white_tiles_in(t, tile, 2)
        self.assertEqual(total, t.d**2)

    def test_parent_and_children(self):
        t = tower("barycentric")
        cx = t.level(2)
        for tile in cx.cells(TILE):
            parent = t.parent(tile)
            self.assertEqual(parent.dim, TILE)
            self.assertIn(tile, t.children(parent))
        for tile in t.level(1).cells(TILE):
            self.assertEqual(len(t.descendants(tile, 3, TILE)), t.d**2)
        self.assertEqual(len(t.descendants(CellRef(0, TILE, 0), 2, TILE)), t.d**2)

    def test_persistent_vertices(self):
        t = tower("lattes2x2")
        for v in t.level(1).cells(VERTEX):
            copy = t.persistent_vertex(v, 3)
            self.assertEqual(copy.level, 3)
            self.assertEqual(t.level(3).root[VERTEX][copy.id], t.level(1).root[VERTEX][v.id])
            self.assertEqual(t.ancestor(copy, 1), v)
            self.assertEqual(local_degree_at(t, copy) % local_degree_at(t, v), 0)

    def test_images_descend_one_level(self):
        t = tower("checkerboard3x3")
        cx = t.level(2)
        for dim in (VERTEX, EDGE, TILE):
            for c in cx.cells(dim):
                image = t.image(c)
                self.assertEqual(image.level, 1)
                self.assertEqual(image.dim, dim)
        for tile in cx.cells(TILE):
            self.assertEqual(cx.color(tile.id), t.level(1).color(t.image(tile).id))

    def test_curve_chains(self):
        t = tower("lattes2x2")
        cx = t.level(2)
        for j in range(t.m):
            chain = cx.curve_chain(j)
            self.assertEqual(len(chain.edges), 4)
            self.assertEqual(chain.vertices[0], cx.zero_vertex(j))
            self.assertEqual(chain.vertices[-1], cx.zero_vertex((j + 1) % t.m))

    @parameterized.expand([("lattes2x2",), ("checkerboard3x3",), ("barycentric",)])
    def test_expansion_level(self, name):
        t = tower(name)
        self.assertEqual(find_expansion_level(t, 4), 1)
        self.assertFalse(any(joins_opposite_sides(c, t.level(1)) for c in t.level(1).cells(TILE)))
        self.assertTrue(all(joins_opposite_sides(c, t.level(0)) for c in t.level(0).cells(TILE)))

    @parameterized.expand(list(product(range(4), range(4))))
    def test_lattes_edge_covers(self, j, k):
        report = cover_edge(tower("lattes2x2"), CellRef(0, EDGE, j), k)
        self.assertTrue(report.contained)
        self.assertEqual(report.card, 2 ** (k + 1))

    @parameterized.expand([("checkerboard3x3", 2), ("barycentric", 3)])
    def test_cover_growth_decreases(self, name, k_max):
        t = tower(name)
        for j in range(t.m):
            reports = cover_growth(t, CellRef(0, EDGE, j), range(k_max + 1))
            self.assertTrue(all(r.contained for r in reports))
            normalized = [r.normalized(t.d) for r in reports]
            self.assertEqual(normalized, sorted(normalized, reverse=True))
            self.assertGreater(normalized[0], normalized[-1])

    def test_level_cap(self):
        t = ComplexTower(load_bundled_rule("lattes2x2"), level_cap=2)
        t.level(2)
        with self.assertRaises(LevelUnavailable):
            t.level(3)
        t.drop(2)
        self.assertEqual(t.built_levels(), [0, 1])

    def test_complex_dict_round_trip(self):
        cx = tower("barycentric").level(2)
        rebuilt = CellComplex.from_dict(cx.to_dict())
        self.assertEqual(rebuilt.to_dict(), cx.to_dict())
        self.assertEqual(rebuilt.lookup(TILE, cx.keys[TILE][5]), 5)

    def test_stretched_checkerboard_never_expands(self):
        t = ComplexTower(generate_checkerboard(2, 1), level_cap=4)
        self.assertIsNone(find_expansion_level(t, 4))
        for n in range(1, 5):
            self.assertTrue(any(joins_opposite_sides(c, t.level(n)) for c in t.level(n).cells(TILE)))

    def test_quarter_turn_expands_at_level_two(self):
        t = ComplexTower(generate_quarter_turn(2, 1), level_cap=4)
        self.assertTrue(all(joins_opposite_sides(c, t.level(1)) for c in t.level(1).cells(TILE)))
        self.assertEqual(find_expansion_level(t, 4), 2)
        self.assertIsNone(find_expansion_level(t, 1))
        self.assertEqual(root_class_counts(t.level(2)), {"ww": 2, "wb": 2, "bw": 2, "bb": 2})

    def test_edge_interior_needs_every_petal(self):
        t = tower("lattes2x2")
        e = CellRef(0, EDGE, 0)
        report = cover_edge(t, e, 1)
        cx = t.level(1)
        on_e = [(c.dim, c.id) for c in t.descendants(e, 1)]
        for v in t.level(0).edge_ends[e.id]:
            on_e.append((VERTEX, t.persistent_vertex(CellRef(0, VERTEX, v), 1).id))
        tiles = {c.id for c in report.tiles}
        self.assertTrue(interior_contains(cx, tiles, on_e))
        self.assertTrue(interior_contains(cx, range(cx.num_tiles), on_e))
        self.assertFalse(interior_contains(cx, (), on_e))
        for tile in tiles:
            self.assertFalse(interior_contains(cx, tiles - {tile}, on_e))
