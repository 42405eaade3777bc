import math
import unittest
from fractions import Fraction
from functools import cache

from parameterized import parameterized

from thurston.complex import TILE, VERTEX, CellRef, ComplexTower
from thurston.dynamics import generic_point, vertex_address
from thurston.measure import (
    DepthBudgetExceeded,
    EmpiricalMeasure,
    StepFunction,
    TileMeasure,
    apply_Q,
    apply_Q_star,
    bound_constants,
    compare,
    degree_sum_bound_check,
    equidist_measure,
    invariance_defect,
    markov_step,
    mome,
    q_iteration,
    q_star_iteration,
    run_backward_orbit,
    tv_threshold,
)
from thurston.rulekit import generate_basilica, generate_quarter_turn, load_bundled_rule
from thurston.utils.rng import OrbitRng


RULES = [("lattes2x2",), ("checkerboard3x3",), ("barycentric",)]


@cache
def tower(name: str) -> ComplexTower:
    return ComplexTower(load_bundled_rule(name), level_cap=8)


WHITE_INDICATOR = StepFunction(0, (Fraction(1), Fraction(0)))


class MeasureTests(unittest.TestCase):
    @parameterized.expand(RULES)
    def test_mome_is_a_probability(self, name):
        t = tower(name)
        for level in range(3):
            mu = mome(t, level)
            self.assertEqual(mu.total, 1)
            self.assertEqual(StepFunction.constant(t, level).integral(mu), 1)
        self.assertEqual(mome(t, 2).coarsen(t, 0), mome(t, 0))

    @parameterized.expand(RULES)
    def test_mome_is_invariant(self, name):
        t = tower(name)
        for level in range(3):
            self.assertTrue(all(x == 0 for x in invariance_defect(t, level)))

    def test_transfer_operator_on_checkerboard(self):
        t = tower("checkerboard3x3")
        q_phi = apply_Q(t, WHITE_INDICATOR)
        self.assertEqual(q_phi.values, (Fraction(5, 9), Fraction(4, 9)))
        gaps = q_iteration(t, WHITE_INDICATOR, 3)
        self.assertEqual(gaps, [Fraction(1, 2 * 9**k) for k in range(4)])

    def test_pullback_of_point_mass(self):
        t = tower("checkerboard3x3")
        delta = TileMeasure(0, (Fraction(1), Fraction(0)))
        pulled = apply_Q_star(t, delta)
        self.assertEqual(pulled.level, 1)
        self.assertEqual(pulled.total, 1)
        self.assertEqual(pulled.coarsen(t, 0).masses, (Fraction(5, 9), Fraction(4, 9)))
        gaps = q_star_iteration(t, delta, 2)
        self.assertEqual(gaps, [Fraction(1, 2 * 9**k) for k in range(3)])

    def test_q_iteration_converges_on_lattes(self):
        t = tower("lattes2x2")
        gaps = q_iteration(t, WHITE_INDICATOR, 2)
        self.assertEqual(gaps[0], Fraction(1, 2))
        self.assertEqual(gaps[1:], [0, 0])

    @parameterized.expand([(1,), (2,)])
    def test_weighted_preimages_equidistribute(self, i):
        t = tower("checkerboard3x3")
        nu = equidist_measure(t, "preimage-weighted", i=i)
        self.assertEqual(nu.total, 1)
        report = compare(t, nu, mome(t, 1), 1)
        expected = Fraction(1, 2 * 9**i)
        self.assertTrue(all(abs(x) == expected for x in report.deviations))
        self.assertEqual(report.max_deviation, expected)
        self.assertEqual(report.skeleton_difference, 0)
        self.assertEqual(report.tv, 9 * expected)

    def test_plain_preimages_match_weighted_off_critical_values(self):
        t = tower("lattes2x2")
        weighted = equidist_measure(t, "preimage-weighted", i=2)
        plain = equidist_measure(t, "preimage-plain", i=2)
        self.assertEqual(weighted.evaluate(t, 2), plain.evaluate(t, 2))
        self.assertEqual(compare(t, plain, mome(t, 1), 1).tv, 0)

    @parameterized.expand([("preperiodic-weighted",), ("preperiodic-plain",)])
    def test_preperiodic_measures_are_probabilities(self, kind):
        t = tower("lattes2x2")
        xi = equidist_measure(t, kind, m=1, n=2)
        self.assertEqual(xi.total, 1)
        report = compare(t, xi, mome(t, 0), 0)
        self.assertLessEqual(report.tv, 1)

    def test_equidist_arguments(self):
        t = tower("lattes2x2")
        with self.assertRaises(ValueError):
            equidist_measure(t, "uniform", i=1)
        with self.assertRaises(ValueError):
            equidist_measure(t, "preimage-weighted")
        with self.assertRaises(ValueError):
            equidist_measure(t, "preperiodic-plain", m=1)

    def test_skeleton_atoms_are_kept_apart(self):
        t = tower("lattes2x2")
        corner = vertex_address(t, CellRef(0, VERTEX, 0), 2)
        inside = generic_point(t, 2)
        empirical = EmpiricalMeasure(((corner, Fraction(1, 4)), (inside, Fraction(3, 4))))
        mu = empirical.evaluate(t, 1)
        self.assertEqual(mu.skeleton_mass, Fraction(1, 4))
        self.assertEqual(mu.total, 1)
        self.assertEqual(mu.mass(inside[1].id), Fraction(3, 4))
        report = compare(t, empirical, mome(t, 1), 1)
        self.assertEqual(report.skeleton_difference, Fraction(1, 4))
        with self.assertRaises(DepthBudgetExceeded):
            empirical.evaluate(t, 3)

    def test_backward_orbit_is_reproducible(self):
        t = tower("checkerboard3x3")
        z = generic_point(t, 1)
        first = run_backward_orbit(t, z, 50, seed=7)
        second = run_backward_orbit(t, z, 50, seed=7)
        self.assertEqual(first, second)
        self.assertEqual(first.total, 1)
        self.assertTrue(all(q.depth == 1 for q, _ in first.atoms))
        with self.assertRaises(ValueError):
            run_backward_orbit(t, z, 0, seed=7)

    def test_backward_orbit_equidistributes(self):
        t = tower("lattes2x2")
        z = generic_point(t, 1)
        steps = 10**5
        mu = mome(t, 1)
        envelope = tv_threshold(t.level(1).num_tiles, steps)
        passed = 0
        for seed in range(5):
            report = compare(t, run_backward_orbit(t, z, steps, seed=seed), mu, 1)
            self.assertEqual(report.skeleton_difference, 0)
            passed += report.tv < 0.05 and report.tv < envelope
        self.assertEqual(passed, 5)

    def test_markov_step_memo(self):
        t = tower("checkerboard3x3")
        z = generic_point(t, 1)
        memo = {}
        q, _ = markov_step(t, z, OrbitRng(5), window=1, memo=memo)
        self.assertIn(z, memo)
        addresses, weights = memo[z]
        self.assertEqual(sum(weights), t.d)
        self.assertTrue(all(a.depth == 1 for a in addresses))
        self.assertIn(q, addresses)
        again, _ = markov_step(t, z, OrbitRng(5), window=1)
        self.assertEqual(again, q)

    def test_markov_step_respects_level_cap(self):
        t = ComplexTower(load_bundled_rule("lattes2x2"), level_cap=2)
        rng = OrbitRng(3)
        q, _ = markov_step(t, generic_point(t, 1), rng)
        self.assertEqual(q.depth, 2)
        self.assertEqual(rng.draws, 1)
        with self.assertRaises(DepthBudgetExceeded):
            markov_step(t, q, rng)
        q, _ = markov_step(t, generic_point(t, 1), rng, window=1)
        self.assertEqual(q.depth, 1)

    def test_tv_threshold(self):
        self.assertAlmostEqual(tv_threshold(4, 100), 0.6)

    @parameterized.expand(
        [("lattes2x2", 1, 4), ("checkerboard3x3", 1, 3), ("barycentric", 2, 4)]
    )
    def test_bound_cases(self, name, case, n_max):
        t = tower(name)
        self.assertEqual(bound_constants(t)[0], case)
        for n in range(1, n_max + 1):
            report = degree_sum_bound_check(t, t.level(n).cells(VERTEX), n)
            self.assertTrue(report.holds)
            self.assertEqual(report.card, t.level(n).num_vertices)
            self.assertEqual(report.lhs, t.m)

    @parameterized.expand([("lattes2x2",), ("barycentric",)])
    def test_bound_on_curve_vertices(self, name):
        t = tower(name)
        for n in range(1, 5):
            cx = t.level(n)
            on_curve = [v for v in cx.cells(VERTEX) if cx.on_curve(VERTEX, v.id)]
            report = degree_sum_bound_check(t, on_curve, n)
            self.assertTrue(report.holds)
            self.assertEqual(report.card, len(on_curve))
            self.assertLess(report.card, cx.num_vertices)

    def test_bound_with_a_critical_two_cycle(self):
        t = ComplexTower(generate_basilica(), level_cap=4)
        case, constant, alpha = bound_constants(t)
        # f^2 fixes -1, 0 and infinity, all critical; deg_{f^2} is 2, 2, 2, 4
        # at -1, 0, 1, infinity, so E = 2·32·3·4^2/3 and C = 4·E
        self.assertEqual(case, 3)
        self.assertEqual(constant, 4096.0)
        self.assertAlmostEqual(alpha, math.log(4 / 3, 4))
        for n in (1, 2):
            report = degree_sum_bound_check(t, t.level(n).cells(VERTEX), n)
            self.assertEqual(report.case, 3)
            self.assertEqual(report.lhs, 3)
            self.assertTrue(report.holds)

    def test_quarter_turn_bound_is_case_one(self):
        t = ComplexTower(generate_quarter_turn(2, 1), level_cap=4)
        self.assertEqual(bound_constants(t), (1, 4.0, 1.0))

    def test_bound_rejects_bad_vertex_sets(self):
        t = tower("lattes2x2")
        with self.assertRaises(ValueError):
            degree_sum_bound_check(t, [], 1)
        with self.assertRaises(ValueError):
            degree_sum_bound_check(t, [CellRef(1, TILE, 0)], 1)
        with self.assertRaises(ValueError):
            degree_sum_bound_check(t, [CellRef(2, VERTEX, 0)], 1)
