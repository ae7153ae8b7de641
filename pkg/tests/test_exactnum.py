import random
from fractions import Fraction

import numpy as np
import pytest

from parastab.errors import BudgetError, DimensionError, FieldReductionError
from parastab.exactnum import (
    Matrix,
    PrimeField,
    QQ,
    Subspace,
    enumerate_subspaces,
    gaussian_binomial,
    image,
    kernel,
    quotient_map,
)

F2 = PrimeField(2)
F3 = PrimeField(3)
F5 = PrimeField(5)


def gaussian_binomial_oracle(n, d, q):
    # product formula evaluated with exact Fractions, kept independent of the
    # integer-division implementation under test
    out = Fraction(1)
    for i in range(d):
        out *= Fraction(q ** (n - i) - 1, q ** (d - i) - 1)
    assert out.denominator == 1
    return out.numerator


class TestFields:
    def test_prime_field_coerce(self):
        assert F5.coerce(7) == 2
        assert F5.coerce(-1) == 4
        assert F5.coerce(Fraction(1, 2)) == 3  # 2 * 3 = 6 = 1 mod 5

    def test_prime_field_bad_denominator(self):
        with pytest.raises(FieldReductionError):
            F5.coerce(Fraction(1, 10))

    def test_no_floats(self):
        with pytest.raises(TypeError):
            QQ.coerce(0.5)
        with pytest.raises(TypeError):
            F3.coerce(1.0)

    def test_prime_cap(self):
        with pytest.raises(ValueError):
            PrimeField(37)
        with pytest.raises(ValueError):
            PrimeField(4)


class TestMatrix:
    def test_matmul_identity(self):
        a = Matrix(QQ, [[1, 2], [3, 4]])
        assert Matrix.identity(QQ, 2) @ a == a

    def test_matmul_mod(self):
        a = Matrix(F3, [[1, 2], [2, 2]])
        b = a @ a
        assert b.rows() == [[2, 0], [0, 2]]

    def test_trace_pow(self):
        a = Matrix(QQ, [[0, 1], [1, 0]])
        assert (a ** 2) == Matrix.identity(QQ, 2)
        assert a.trace() == 0

    def test_charpoly_companion(self):
        # X^2 - X - 1 companion matrix
        a = Matrix(QQ, [[0, 1], [1, 1]])
        assert a.charpoly() == (1, -1, -1)

    def test_charpoly_mod(self):
        a = Matrix(F5, [[2, 0], [0, 3]])
        # (X-2)(X-3) = X^2 - 5X + 6 = X^2 + 1 mod 5
        assert a.charpoly() == (1, 0, 1)

    def test_charpoly_berkowitz_vs_expanded_3x3(self):
        rng = random.Random(7)
        for _ in range(25):
            rows = [[Fraction(rng.randint(-4, 4)) for _ in range(3)] for _ in range(3)]
            a = Matrix(QQ, rows)
            # oracle: expand det(XI - A) by brute-force permutation sum
            coeffs = _charpoly_permanent_oracle(rows)
            assert list(a.charpoly()) == coeffs

    def test_dim_mismatch(self):
        with pytest.raises(DimensionError):
            Matrix(QQ, [[1, 2]]) @ Matrix(QQ, [[1, 2]])


def _charpoly_permanent_oracle(rows):
    # det(XI - A) via Leibniz formula over Q[X] with dense coefficient lists
    import itertools

    n = len(rows)

    def poly_mul(p, q):
        out = [Fraction(0)] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            for j, b in enumerate(q):
                out[i + j] += a * b
        return out

    def sign(perm):
        s = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    s = -s
        return s

    total = [Fraction(0)] * (n + 1)
    for perm in itertools.permutations(range(n)):
        term = [Fraction(1)]
        for i in range(n):
            j = perm[i]
            entry = [Fraction(-1) * rows[i][j], Fraction(1)] if i == j else [Fraction(-1) * rows[i][j]]
            term = poly_mul(term, entry)
        s = sign(perm)
        for k, c in enumerate(term):
            total[k] += s * c
    return [total[n - k] for k in range(n + 1)]


class TestSubspace:
    def test_canonical_rref(self):
        # two spanning sets of the same plane give identical representatives
        a = Subspace(QQ, 3, [[1, 1, 0], [0, 1, 1]])
        b = Subspace(QQ, 3, [[1, 2, 1], [2, 3, 1]])
        assert a == b
        assert a.basis_rows() == b.basis_rows()

    def test_intersect_idempotent(self):
        u = Subspace(F2, 3, [[1, 0, 1], [0, 1, 1]])
        assert u.intersect(u) == u

    def test_intersect_transverse_lines(self):
        e1 = Subspace(F2, 2, [[1, 0]])
        e2 = Subspace(F2, 2, [[0, 1]])
        assert e1.intersect(e2).is_zero()

    def test_intersect_planes_q3(self):
        # span(e1,e2) cap span(e2,e3) = span(e2), by the joint membership system
        u = Subspace(QQ, 3, [[1, 0, 0], [0, 1, 0]])
        w = Subspace(QQ, 3, [[0, 1, 0], [0, 0, 1]])
        got = u.intersect(w)
        assert got == Subspace(QQ, 3, [[0, 1, 0]])

    def test_modular_law_random(self):
        rng = random.Random(11)
        for _ in range(60):
            n = rng.randint(1, 5)
            field = random.Random(rng.random()).choice([F2, F3, QQ])
            du, dw = rng.randint(0, n), rng.randint(0, n)
            u = Subspace(field, n, [[rng.randint(-3, 3) for _ in range(n)] for _ in range(du)])
            w = Subspace(field, n, [[rng.randint(-3, 3) for _ in range(n)] for _ in range(dw)])
            assert (u + w).dim + u.intersect(w).dim == u.dim + w.dim

    def test_image_identity(self):
        w = Subspace(QQ, 2, [[1, 1]])
        assert image(Matrix.identity(QQ, 2), w) == w

    def test_image_nilpotent(self):
        a = Matrix(QQ, [[0, 1], [0, 0]])
        w = Subspace.full(QQ, 2)
        assert image(a, w) == Subspace(QQ, 2, [[1, 0]])

    def test_image_rank_one(self):
        a = Matrix(QQ, [[1, 1], [2, 2]])
        w = Subspace.full(QQ, 2)
        img = image(a, w)
        assert img.dim == Matrix(QQ, [[1, 1], [2, 2]]).rank() == 1

    def test_kernel_rank_nullity(self):
        rng = random.Random(3)
        for _ in range(40):
            r, c = rng.randint(1, 4), rng.randint(1, 4)
            m = Matrix(F3, [[rng.randint(0, 2) for _ in range(c)] for _ in range(r)])
            assert kernel(m).dim + m.rank() == c

    def test_quotient_map_section(self):
        w = Subspace(QQ, 3, [[1, 2, 0]])
        proj, lift = quotient_map(w)
        assert (proj @ lift) == Matrix.identity(QQ, 2)
        # w maps to zero
        assert all(x == 0 for x in proj.apply([1, 2, 0]))

    def test_contains(self):
        u = Subspace(F3, 3, [[1, 0, 0], [0, 1, 0]])
        assert u.contains(Subspace(F3, 3, [[1, 1, 0]]))
        assert not u.contains(Subspace(F3, 3, [[0, 0, 1]]))

    def test_restrict_roundtrip(self):
        u = Subspace(QQ, 3, [[1, 0, 1], [0, 1, 2]])
        sub = Subspace(QQ, 3, [[1, 1, 3]])
        assert u.contains(sub)
        r = u.restrict_rows(sub)
        assert r.dim == 1 and r.ambient_dim == 2


class TestEnumeration:
    def test_f2_lines_in_plane(self):
        subs = enumerate_subspaces(F2, 2, 1)
        assert len(subs) == 3
        assert [s.basis_rows() for s in subs] == [[[0, 1]], [[1, 0]], [[1, 1]]]

    def test_f2_planes_in_4space(self):
        subs = enumerate_subspaces(F2, 4, 2)
        assert len(subs) == 35 == gaussian_binomial_oracle(4, 2, 2)

    def test_zero_dim(self):
        subs = enumerate_subspaces(F3, 3, 0)
        assert len(subs) == 1 and subs[0].is_zero()

    @pytest.mark.parametrize("q", [2, 3])
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_counts_match_product_formula(self, n, q):
        field = PrimeField(q)
        for d in range(n + 1):
            subs = enumerate_subspaces(field, n, d)
            assert len(subs) == gaussian_binomial_oracle(n, d, q)
            assert len(subs) == gaussian_binomial(n, d, q)
            # no duplicates, canonical, sorted
            keys = [s.sort_key() for s in subs]
            assert keys == sorted(set(keys))

    def test_budget(self):
        with pytest.raises(BudgetError):
            enumerate_subspaces(F5, 4, 2, budget=10)

    def test_enumeration_is_rref(self):
        for s in enumerate_subspaces(F3, 3, 2):
            arr = np.asarray(s.array)
            again = Subspace(F3, 3, arr)
            assert again == s
