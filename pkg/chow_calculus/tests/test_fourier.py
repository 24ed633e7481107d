import itertools
import random
import unittest
from fractions import Fraction

import pytest

from chow_calculus.core.chow import CubeAmbient, Cycle, DegreeMismatch, degree_cube
from chow_calculus.core.fourier import (
    FourierCycle,
    InvalidPermutation,
    TupleLengthMismatch,
    act_on_tuple,
    c_to_f,
    canonical_tuple,
    canonical_tuples,
    degree_f,
    degree_f_cycle,
    degree_table,
    f_to_c,
    fourier_vertex,
    orbit,
    orbit_size,
    psi,
    sigma_act,
    vector_key,
)
from chow_calculus.core.simplicial import parse_bitstring, popcount, to_bitstring

TABLE_D2 = {
    ("10", "01", "11"): 16,
    ("11", "11", "11"): -32,
}

TABLE_D3 = {
    ("100", "010", "001", "111"): -64,
    ("100", "010", "101", "011"): -64,
    ("100", "110", "101", "111"): -64,
    ("100", "011", "011", "111"): 128,
    ("100", "111", "111", "111"): 128,
    ("110", "110", "101", "011"): 128,
    ("110", "101", "111", "111"): -128,
    ("111", "111", "111", "111"): 512,
}

def V(*tokens):
    return tuple(parse_bitstring(t) for t in tokens)

def F(d, token):
    return fourier_vertex(d, parse_bitstring(token, d))

def unit(i):
    return 1 << i

class TestBasisChange(unittest.TestCase):

    def test_d1(self):

        ambient = CubeAmbient(1)
        c0, c1 = Cycle.vertex(ambient, 0), Cycle.vertex(ambient, 1)

        self.assertEqual(f_to_c(F(1, "0")), c0 + c1)
        self.assertEqual(f_to_c(F(1, "1")), c0 - c1)

    def test_round_trip(self):

        for d in (1, 2, 3, 4):
            for v in range(1 << d):
                self.assertEqual(c_to_f(f_to_c(fourier_vertex(d, v))), fourier_vertex(d, v))

    def test_inverse_transform(self):

        ambient = CubeAmbient(2)
        c = c_to_f(Cycle.vertex(ambient, 0b11))

        self.assertEqual(c.terms, {0: Fraction(1, 4), 1: Fraction(-1, 4), 2: Fraction(-1, 4), 3: Fraction(1, 4)})
        self.assertEqual(f_to_c(c), Cycle.vertex(ambient, 0b11))

    def test_degree_one_only(self):

        ambient = CubeAmbient(2)
        with self.assertRaises(DegreeMismatch):
            c_to_f(Cycle.monomial(ambient, [0, 3]))

class TestFourierDegree(unittest.TestCase):

    def test_examples(self):

        self.assertEqual(degree_f(2, V("10", "01", "11")), 16)
        self.assertEqual(degree_f(2, V("11", "11", "11")), -32)
        self.assertEqual(degree_f(3, V("111", "111", "111", "111")), 512)

    def test_zero_vector_kills(self):

        for d in (1, 2):
            for rest in itertools.product(range(1 << d), repeat=d):
                self.assertEqual(degree_f(d, (0,) + rest), 0)

    def test_tuple_length(self):

        with self.assertRaises(TupleLengthMismatch):
            degree_f(2, V("10", "01"))

    def test_unit_vector_formula(self):

        for d in (1, 2, 3):
            units = tuple(unit(i) for i in range(d))
            for v in range(1 << d):
                expected = (-4) ** d if v == (1 << d) - 1 else 0
                self.assertEqual(degree_f(d, units + (v,)), expected)

    @pytest.mark.slow
    def test_unit_vector_formula_d4(self):

        units = tuple(unit(i) for i in range(4))
        for v in range(16):
            self.assertEqual(degree_f(4, units + (v,)), 256 if v == 15 else 0)

    def test_full_table_d2(self):

        for vectors in itertools.product(range(4), repeat=3):
            if all(v == 3 for v in vectors):
                expected = -32
            elif set(vectors) == {1, 2, 3}:
                expected = 16
            else:
                expected = 0

            self.assertEqual(degree_f(2, vectors), expected, vectors)

    def test_full_table_d3(self):

        table = {V(*key): value for key, value in TABLE_D3.items()}
        for vectors in itertools.product(range(8), repeat=4):
            expected = table.get(canonical_tuple(3, vectors), 0)

            self.assertEqual(degree_f(3, vectors), expected, vectors)

    def test_parity_vanishing(self):

        for d in (1, 2, 3):
            for vectors in itertools.product(range(1 << d), repeat=d + 1):
                total = 0
                for v in vectors:
                    total ^= v
                if popcount(total) % 2:
                    self.assertEqual(degree_f(d, vectors), 0, vectors)

    def test_shift_identity(self):

        for i in range(3):
            e = unit(i)
            for u, v, w in itertools.product(range(8), repeat=3):
                self.assertEqual(
                    degree_f(3, (e, u, v, w)),
                    degree_f(3, (e, u ^ e, v ^ e, w)),
                    (e, u, v, w)
                )

    def test_relation_identities(self):

        rng = random.Random(31)
        for d in (2, 3):
            ambient = CubeAmbient(d)
            for _ in range(40):
                v, v2 = rng.randrange(1 << d), rng.randrange(1 << d)
                e, e2 = unit(rng.randrange(d)), unit(rng.randrange(d))
                filler = Cycle.monomial(ambient, [rng.randrange(1 << d) for _ in range(d - 1)])
                Fv = lambda x: fourier_vertex(d, x)

                self.assertEqual(degree_f_cycle(d, [Fv(0), Fv(v)], filler), 0)

                lhs = degree_f_cycle(d, [Fv(v ^ e ^ e2) - Fv(v), Fv(v2 ^ e ^ e2) - Fv(v2)], filler)
                rhs = degree_f_cycle(d, [Fv(v ^ e) - Fv(v ^ e2), Fv(v2 ^ e) - Fv(v2 ^ e2)], filler)
                self.assertEqual(lhs, rhs)

                small = Cycle.monomial(ambient, [rng.randrange(1 << d) for _ in range(d - 2)])
                self.assertEqual(
                    degree_f_cycle(d, [Fv(e), Fv(v) + Fv(v ^ e), Fv(v2) - Fv(v2 ^ e)], small),
                    0
                )

class TestSymmetries(unittest.TestCase):

    def test_psi(self):

        ambient = CubeAmbient(2)

        self.assertEqual(psi(Cycle.vertex(ambient, 0)), Cycle.vertex(ambient, 3))
        self.assertEqual(psi(F(2, "11")), F(2, "11"))
        self.assertEqual(psi(F(2, "10")), -F(2, "10"))

    def test_psi_is_an_involution(self):

        rng = random.Random(37)
        ambient = CubeAmbient(3)
        for _ in range(20):
            factors = [rng.randrange(8) for _ in range(3)]
            a = Cycle.monomial(ambient, factors, rng.randint(1, 5))
            self.assertEqual(psi(psi(a)), a)

            x = FourierCycle(3, {rng.randrange(8): rng.randint(1, 5) for _ in range(3)})
            self.assertEqual(psi(psi(x)), x)

    def test_psi_commutes_with_the_transform(self):

        for v in range(8):
            self.assertEqual(f_to_c(psi(fourier_vertex(3, v))), psi(f_to_c(fourier_vertex(3, v))))

    def test_sigma(self):

        ambient = CubeAmbient(2)
        a = Cycle.monomial(ambient, [0, 1, 3])

        self.assertEqual(sigma_act((0, 1), a), a)
        self.assertEqual(sigma_act((1, 0), Cycle.vertex(ambient, parse_bitstring("10"))),
            Cycle.vertex(ambient, parse_bitstring("01")))
        self.assertEqual(sigma_act((1, 2, 0), F(3, "100")), F(3, "010"))

        with self.assertRaises(InvalidPermutation):
            sigma_act((0, 0), a)
        with self.assertRaises(InvalidPermutation):
            act_on_tuple(V("10", "01", "11"), (0, 1), (0, 1))

    def test_degree_invariance(self):

        rng = random.Random(41)
        for d in (1, 2, 3):
            for _ in range(10):
                vectors = tuple(rng.randrange(1 << d) for _ in range(d + 1))
                value = degree_f(d, vectors)
                for sigma in itertools.permutations(range(d + 1)):
                    for tau in itertools.permutations(range(d)):
                        self.assertEqual(degree_f(d, act_on_tuple(vectors, sigma, tau)), value)

    def test_compatibility_with_local_degree(self):

        rng = random.Random(43)
        ambient = CubeAmbient(2)
        for _ in range(20):
            a = Cycle.monomial(ambient, [rng.randrange(4) for _ in range(3)])

            self.assertEqual(degree_cube(2, psi(a)), degree_cube(2, a))
            self.assertEqual(degree_cube(2, sigma_act((1, 0), a)), degree_cube(2, a))

class TestOrbits(unittest.TestCase):

    def test_vector_order(self):

        ordered = sorted(range(1, 8), key=lambda v: vector_key(v, 3))

        self.assertEqual(
            [to_bitstring(v, 3) for v in ordered],
            ["100", "010", "001", "110", "101", "011", "111"]
        )

    def test_canonical_tuple(self):

        self.assertEqual(canonical_tuple(3, V("111", "100", "010", "001")), V("100", "010", "001", "111"))
        self.assertEqual(canonical_tuple(3, V("010", "100", "101", "011")), V("100", "010", "101", "011"))

    def test_canonical_is_idempotent(self):

        for vectors in canonical_tuples(2):
            self.assertEqual(canonical_tuple(2, vectors), vectors)

    def test_canonical_is_brute_force_minimum(self):

        rng = random.Random(47)
        for _ in range(20):
            vectors = tuple(rng.randrange(8) for _ in range(4))
            images = orbit(3, vectors)
            expected = min(images, key=lambda t: [vector_key(v, 3) for v in t])

            self.assertEqual(canonical_tuple(3, vectors), expected)

    def test_orbit_sizes_cover_all_tuples(self):

        for d in (1, 2, 3):
            self.assertEqual(
                sum(orbit_size(d, vectors) for vectors in canonical_tuples(d)),
                (1 << d) ** (d + 1)
            )

    def test_orbit_size(self):

        self.assertEqual(orbit_size(2, V("10", "01", "11")), 6)
        self.assertEqual(orbit_size(2, V("11", "11", "11")), 1)

class TestDegreeTable(unittest.TestCase):

    def test_table_d2(self):

        table = degree_table(2)

        self.assertEqual(
            {row.representative: row.degree for row in table.frame.itertuples()},
            TABLE_D2
        )
        self.assertEqual(table.render(), "(10,01,11)\t16\t6\n(11,11,11)\t-32\t1")

    def test_table_d3(self):

        table = degree_table(3)

        self.assertEqual(
            {row.representative: row.degree for row in table.frame.itertuples()},
            TABLE_D3
        )
        self.assertEqual(table.render(), degree_table(3).render())

    def test_all_rows(self):

        table = degree_table(2, nonzero_only=False)

        self.assertEqual(len(table), len(list(canonical_tuples(2))))
        self.assertEqual(table.frame["orbit_size"].sum(), 64)
