import itertools
import random
import unittest
from fractions import Fraction

import pytest

from chow_calculus.core.chow import (
    AlreadyProper,
    AmbientMismatch,
    BasisTooLarge,
    CubeAmbient,
    Cycle,
    DegreeMismatch,
    GraphMorphism,
    InvalidMorphism,
    NormalizationDiverged,
    ProductAmbient,
    ProductMorphism,
    cycle_mul,
    degree_cube,
    degree_product,
    degree_product_contributions,
    fibre_sum,
    is_proper,
    make_monomial,
    monomial_basis,
    monomial_degree,
    normalize_cube,
    oracle_degree,
    pullback,
    relation_generators,
    rewrite_step,
    total_sum,
)
from chow_calculus.core.simplicial import (
    CubeEmbedding,
    DimensionMismatch,
    cube_embeddings,
    cycle_graph,
    is_cube_chain,
    parse_bitstring,
    path_graph,
    standard_simplex,
)

def C(d, *tokens, coefficient=1):
    """Monomial of the standard cube from bitstring tokens."""
    return Cycle.monomial(CubeAmbient(d), [parse_bitstring(t, d) for t in tokens], coefficient)

def maximal_chains(d):
    for order in itertools.permutations(range(d)):
        chain, v = [0], 0
        for i in order:
            v |= 1 << i
            chain.append(v)
        yield chain

def random_cycle(ambient, k, rng, terms=3, prune=False):
    vertices = ambient.vertices()
    result = Cycle.zero(ambient, k)
    for _ in range(rng.randint(1, terms)):
        factors = [rng.choice(vertices) for _ in range(k)]
        term = Cycle.monomial(ambient, factors, rng.randint(-3, 3) or 1)
        if prune:
            term = cycle_mul(Cycle.one(ambient), term)
        result = result + term
    return result

class TestCycleArithmetic(unittest.TestCase):

    def test_product_of_comparable_vertices(self):

        a = C(2, "00") * C(2, "11")

        self.assertEqual(a, C(2, "00", "11"))
        self.assertEqual(a.degree, 2)

    def test_incomparable_product_is_pruned(self):

        self.assertTrue((C(2, "10") * C(2, "01")).is_zero())
        self.assertFalse(cycle_mul(C(2, "10"), C(2, "01"), prune=False).is_zero())

    def test_distributivity(self):

        a = (C(2, "00") + C(2, "11")) * C(2, "00")

        self.assertEqual(a, C(2, "00", "00") + C(2, "00", "11"))

    def test_scaling_and_cancellation(self):

        a = C(2, "00", "11")

        self.assertTrue((a - a).is_zero())
        self.assertEqual(Fraction(1, 2) * a + Fraction(1, 2) * a, a)
        m = next(iter(a.terms))
        self.assertEqual((3 * a).coefficient(m), 3)
        self.assertTrue((0 * a).is_zero())

    def test_errors(self):

        with self.assertRaises(DegreeMismatch):
            C(2, "00") + C(2, "00", "11")
        with self.assertRaises(AmbientMismatch):
            C(2, "00") + C(3, "000")
        with self.assertRaises(DegreeMismatch):
            ambient = CubeAmbient(1)
            Cycle(ambient, {make_monomial(ambient, [0]): 1, make_monomial(ambient, [0, 1]): 1})

    def test_sums(self):

        ambient = CubeAmbient(2)

        self.assertEqual(len(total_sum(ambient)), 4)
        self.assertEqual(fibre_sum(ambient, 0, 0), C(2, "00") + C(2, "01"))
        self.assertEqual(fibre_sum(ambient, 1, 1), C(2, "01") + C(2, "11"))

    def test_render(self):

        self.assertEqual((C(2, "00", "00", "11", coefficient=-2)).render(), "-2* 00^2 11")

class TestRelationGenerators(unittest.TestCase):

    def test_non_simplex_pair(self):

        generators = list(relation_generators(CubeAmbient(2), 2))

        self.assertIn(cycle_mul(C(2, "10"), C(2, "01"), prune=False), generators)

    def test_total_sum_family(self):

        ambient = CubeAmbient(1)
        generators = list(relation_generators(ambient, 2))

        for v in ("0", "1"):
            self.assertIn(cycle_mul(total_sum(ambient), C(1, v), prune=False), generators)

    def test_projection_family(self):

        ambient = CubeAmbient(2)
        generators = list(relation_generators(ambient, 3))
        expected = cycle_mul(C(2, "00", "11"), C(2, "00") + C(2, "01"), prune=False)

        self.assertIn(expected, generators)

    def test_basis_guard(self):

        with self.assertRaises(BasisTooLarge):
            list(relation_generators(CubeAmbient(3), 4, max_basis_size=10))

class TestMorphisms(unittest.TestCase):

    def test_invalid_morphisms(self):

        with self.assertRaises(InvalidMorphism):
            GraphMorphism(path_graph(2), path_graph(2), (1, 0, 2))
        with self.assertRaises(InvalidMorphism):
            GraphMorphism(path_graph(2), path_graph(2), (0, 2, 2))
        with self.assertRaises(InvalidMorphism):
            GraphMorphism(path_graph(2), path_graph(1), (0, 1))

    def test_identity_pullback(self):

        g = cycle_graph(3)
        ambient = ProductAmbient(g, 2)
        a = random_cycle(ambient, 2, random.Random(3), prune=True)

        self.assertEqual(pullback(GraphMorphism.identity(g), a), a)

    def test_collapse_pullback(self):

        f = GraphMorphism(path_graph(2), path_graph(1), (0, 1, 1))
        b = Cycle.vertex(ProductAmbient(path_graph(1), 1), (1,))
        source = ProductAmbient(path_graph(2), 1)

        self.assertEqual(
            pullback(f, b),
            Cycle.vertex(source, (1,)) + Cycle.vertex(source, (2,))
        )

    def test_restriction_outside_the_cube(self):

        g = path_graph(2)
        a = Cycle.vertex(ProductAmbient(g, 2), (0, 0))

        self.assertTrue(pullback(CubeEmbedding(edges=(1, 1)), a).is_zero())
        self.assertEqual(pullback(CubeEmbedding(edges=(0, 0)), a).terms, {((0, 1),): 1})

        with self.assertRaises(DimensionMismatch):
            pullback(CubeEmbedding(edges=(0,)), a)

    def test_functoriality(self):

        rng = random.Random(5)
        f = GraphMorphism(path_graph(3), path_graph(2), (0, 1, 1, 2))
        g = GraphMorphism(path_graph(2), path_graph(1), (0, 1, 1))
        h = GraphMorphism(path_graph(2), path_graph(1), (0, 0, 1))

        composed = ProductMorphism((g, h)).compose(ProductMorphism((f, f)))
        target = ProductAmbient(path_graph(1), 2)
        for _ in range(20):
            a = random_cycle(target, rng.randint(1, 3), rng)

            self.assertEqual(
                pullback(composed, a),
                pullback(ProductMorphism((f, f)), pullback(ProductMorphism((g, h)), a))
            )

    def test_pullback_is_multiplicative(self):

        rng = random.Random(9)
        f = GraphMorphism(path_graph(3), cycle_graph(3), (0, 1, 2, 2))
        target = ProductAmbient(cycle_graph(3), 2)
        for _ in range(20):
            a, b = random_cycle(target, 1, rng), random_cycle(target, 2, rng)

            self.assertEqual(pullback(f, a * b), pullback(f, a) * pullback(f, b))

class TestNormalization(unittest.TestCase):

    def test_proper_chain_is_fixed(self):

        a = C(2, "00", "10", "11")

        self.assertEqual(normalize_cube(2, a), a)

    def test_single_rewrite(self):

        self.assertEqual(normalize_cube(2, C(2, "00", "00", "11")), -C(2, "00", "01", "11"))

    def test_alternative_tie_break(self):

        # reducing along the second coordinate instead gives -C_00 C_10 C_11
        seen = set()
        for seed in range(20):
            result = normalize_cube(2, C(2, "00", "00", "11"), rng=random.Random(seed))
            seen.add(result.render())

        self.assertEqual(seen, {"-1* 00 10 11", "-1* 00 01 11"})

    def test_pure_powers_become_proper_chains(self):

        for d in (1, 2, 3):
            for v in range(1 << d):
                a = Cycle.monomial(CubeAmbient(d), [v] * (d + 1))
                result = normalize_cube(d, a)

                for m in result.terms:
                    self.assertTrue(is_proper(m))
                    self.assertTrue(is_cube_chain([w for w, _ in m]))

    def test_rewrite_step_rejects_proper_monomials(self):

        with self.assertRaises(AlreadyProper):
            rewrite_step(2, next(iter(C(2, "00", "11").terms)))

    def test_iteration_cap(self):

        with self.assertRaises(NormalizationDiverged):
            normalize_cube(2, C(2, "00", "00", "11"), max_steps=0)

class TestLocalDegree(unittest.TestCase):

    def test_examples(self):

        self.assertEqual(degree_cube(2, C(2, "00", "10", "11")), 1)
        self.assertEqual(degree_cube(2, C(2, "10", "01", "11")), 0)
        self.assertEqual(degree_cube(2, C(2, "00", "00", "11")), -1)
        self.assertEqual(degree_cube(1, C(1, "0", "0")), -1)

    def test_wrong_degree(self):

        with self.assertRaises(DegreeMismatch):
            degree_cube(2, C(2, "00", "11"))
        with self.assertRaises(DegreeMismatch):
            monomial_degree(2, next(iter(C(2, "00").terms)))

    def test_linearity(self):

        rng = random.Random(13)
        for d in (1, 2, 3):
            ambient = CubeAmbient(d)
            for _ in range(50):
                a, b = random_cycle(ambient, d + 1, rng), random_cycle(ambient, d + 1, rng)
                p, q = Fraction(rng.randint(-5, 5), rng.randint(1, 4)), Fraction(rng.randint(-5, 5))

                self.assertEqual(
                    degree_cube(d, p * a + q * b),
                    p * degree_cube(d, a) + q * degree_cube(d, b)
                )

    def test_relations_have_degree_zero(self):

        for d in (1, 2):
            for r in relation_generators(CubeAmbient(d), d + 1):
                self.assertEqual(degree_cube(d, r), 0, r.render())
                self.assertEqual(degree_cube(d, r, rng=random.Random(d)), 0, r.render())

    @pytest.mark.slow
    def test_relations_have_degree_zero_d3(self):

        rng = random.Random(17)
        generators = list(relation_generators(CubeAmbient(3), 4))
        for r in generators:
            self.assertEqual(degree_cube(3, r), 0, r.render())
        for _ in range(10000):
            r = rng.choice(generators)
            self.assertEqual(degree_cube(3, r, rng=rng), 0, r.render())

    def test_confluence(self):

        rng = random.Random(19)
        for d in (1, 2):
            ambient = CubeAmbient(d)
            for _ in range(1000):
                a = random_cycle(ambient, d + 1, rng)
                expected = degree_cube(d, a)
                for rerun in range(5):
                    self.assertEqual(degree_cube(d, a, rng=random.Random(rng.random())), expected)

    @pytest.mark.slow
    def test_confluence_d3(self):

        rng = random.Random(23)
        ambient = CubeAmbient(3)
        for _ in range(1000):
            a = random_cycle(ambient, 4, rng)
            expected = degree_cube(3, a)
            for rerun in range(5):
                self.assertEqual(degree_cube(3, a, rng=random.Random(rng.random())), expected)

class TestOracle(unittest.TestCase):

    def test_examples(self):

        self.assertEqual(oracle_degree(2, C(2, "00", "10", "11")), 1)
        self.assertEqual(oracle_degree(2, C(2, "00", "00", "11")), -1)
        self.assertEqual(oracle_degree(1, C(1, "0", "0")), degree_cube(1, C(1, "0", "0")))

    def test_equivalence_up_to_d2(self):

        for d in (1, 2):
            ambient = CubeAmbient(d)
            basis = list(monomial_basis(ambient, d + 1))
            for m in basis:
                a = Cycle(ambient, {m: 1})
                self.assertEqual(degree_cube(d, a), oracle_degree(d, a), a.render())

        self.assertEqual(len(basis), 20)

    @pytest.mark.slow
    def test_equivalence_d3(self):

        ambient = CubeAmbient(3)
        basis = list(monomial_basis(ambient, 4))
        self.assertEqual(len(basis), 330)
        for m in basis:
            a = Cycle(ambient, {m: 1})
            self.assertEqual(degree_cube(3, a), oracle_degree(3, a), a.render())

    def test_size_guard(self):

        with self.assertRaises(BasisTooLarge):
            oracle_degree(4, C(4, "0000", "1000", "1100", "1110", "1111"))

class TestProductDegree(unittest.TestCase):

    def test_maximal_chain_on_triangle_square(self):

        g = cycle_graph(3)
        a = Cycle.monomial(ProductAmbient(g, 2), [(0, 0), (0, 1), (1, 1)])

        self.assertEqual(degree_product(g, 2, a), 1)
        self.assertEqual(len(degree_product_contributions(g, 2, a)), 1)

    def test_non_simplex_has_degree_zero(self):

        g = cycle_graph(3)
        a = Cycle.monomial(ProductAmbient(g, 2), [(0, 0), (1, 0), (0, 1)])

        self.assertEqual(degree_product(g, 2, a), 0)

    def test_total_sum_relation_on_path(self):

        g = path_graph(2)
        ambient = ProductAmbient(g, 1)
        a = total_sum(ambient) * Cycle.vertex(ambient, (1,))

        self.assertEqual(degree_product(g, 1, a), 0)

    def test_localization(self):

        g = path_graph(2)
        for d in (1, 2, 3):
            ambient = ProductAmbient(g, d)
            for gamma in cube_embeddings(g, d):
                for chain in maximal_chains(d):
                    a = Cycle.monomial(ambient, [gamma.embed(v, g) for v in chain])
                    contributions = degree_product_contributions(g, d, a)

                    self.assertEqual(degree_product(g, d, a), 1)
                    self.assertEqual(list(contributions), [gamma])

    def test_standard_simplex_matches_cube(self):

        rng = random.Random(29)
        g = standard_simplex()
        for d in (1, 2):
            ambient = ProductAmbient(g, d)
            gamma = CubeEmbedding(edges=(0,) * d)
            for _ in range(50):
                a = random_cycle(ambient, d + 1, rng)

                self.assertEqual(degree_product(g, d, a), degree_cube(d, pullback(gamma, a)))

    def test_wrong_ambient(self):

        with self.assertRaises(AmbientMismatch):
            degree_product(cycle_graph(3), 1, C(1, "0", "1"))
