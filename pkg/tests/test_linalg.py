import random

import pytest

from sdlp.errors import SdlpError
from sdlp.ff import Poly, PrimeField, field_of_size
from sdlp.linalg import (
    Matrix,
    coordinates_in_basis,
    eval_poly_at_matrix,
    field_from_matrix,
    invariant_subspace,
    min_poly,
    nullspace,
    solve_linear,
)

F5 = PrimeField(5)
B_SPEC = Matrix(F5, [[0, 4], [1, 4]])  # minimal polynomial x^2 + x + 1


class TestNullspace:
    def test_identity_has_trivial_nullspace(self):
        assert nullspace(Matrix.identity(F5, 3)) == []

    def test_zero_matrix(self):
        basis = nullspace(Matrix.zeros(F5, 2, 2))
        assert len(basis) == 2

    def test_rank_one_example(self):
        M = Matrix(F5, [[1, 2], [2, 4]])
        basis = nullspace(M)
        assert len(basis) == 1
        # {(3,1)} up to scaling: enumerate all 25 vectors as the oracle
        kernel = {(x, y) for x in range(5) for y in range(5) if M.matvec((x, y)) == (0, 0)}
        assert kernel == {tuple(a * c % 5 for c in basis[0]) for a in range(5)}

    def test_rank_nullity(self):
        rng = random.Random(0)
        for _ in range(150):
            q = rng.choice([2, 3, 5, 9, 97])
            F = field_of_size(q)
            r, c = rng.randrange(1, 7), rng.randrange(1, 7)
            M = Matrix(F, [[F.rand(rng) for _ in range(c)] for _ in range(r)])
            basis = nullspace(M)
            assert M.rank() + len(basis) == c
            for v in basis:
                assert M.matvec(v) == (F.zero,) * r


class TestMinPoly:
    def test_identity(self):
        assert min_poly(Matrix.identity(F5, 3)) == Poly(F5, [4, 1])

    def test_zero(self):
        assert min_poly(Matrix.zeros(F5, 2, 2)) == Poly(F5, [0, 1])

    def test_spec_matrix(self):
        m = min_poly(B_SPEC)
        assert m == Poly(F5, [1, 1, 1])
        assert (B_SPEC * B_SPEC + B_SPEC + Matrix.identity(F5, 2)).entries_key() == (0, 0, 0, 0)

    def test_annihilates_and_divides_char(self):
        rng = random.Random(3)
        for _ in range(80):
            q = rng.choice([2, 3, 5, 8])
            F = field_of_size(q)
            n = rng.randrange(1, 5)
            B = Matrix(F, [[F.rand(rng) for _ in range(n)] for _ in range(n)])
            m = min_poly(B)
            assert m.is_monic() and m.degree() <= n
            Z = eval_poly_at_matrix(m, B)
            assert all(v == F.zero for v in Z.flatten())


class TestInvariantSubspace:
    FULL2 = [(1, 0), (0, 1)]

    def test_irreducible_companion(self):
        comp = Matrix.companion(Poly(F5, [1, 1, 1]))
        assert invariant_subspace(comp, self.FULL2) is None

    def test_diagonal_gives_eigenline(self):
        D = Matrix(F5, [[1, 0], [0, 2]])
        W = invariant_subspace(D, self.FULL2)
        assert W is not None and len(W) == 1
        v = W[0]
        assert coordinates_in_basis(F5, W, D.matvec(v)) is not None

    def test_identity_gives_line(self):
        W = invariant_subspace(Matrix.identity(F5, 2), self.FULL2)
        assert W is not None and len(W) == 1

    def test_minimality_brute_force(self):
        # all cyclic submodules of the returned W must equal W
        rng = random.Random(7)
        for _ in range(60):
            p = rng.choice([2, 3, 5])
            d = rng.randrange(2, 5)
            if p ** d > 1 << 12:
                continue
            F = PrimeField(p)
            B = Matrix(F, [[F.rand(rng) for _ in range(d)] for _ in range(d)])
            full = [tuple(F.one if i == j else F.zero for j in range(d)) for i in range(d)]
            W = invariant_subspace(B, full)
            if W is None:
                m = min_poly(B)
                from sdlp.ff import factor_poly

                factors = factor_poly(m)
                assert len(factors) == 1 and factors[0][1] == 1 and m.degree() == d
                continue
            assert 1 <= len(W) < d
            for v in W:
                got = coordinates_in_basis(F, W, B.matvec(v))
                assert got is not None, "W is not invariant"
            for vec in _all_nonzero_in_span(F, W):
                cyclic = _cyclic_module(F, B, vec)
                assert len(cyclic) == len(W), "W contains a smaller invariant subspace"


def _all_nonzero_in_span(F, basis):
    p = F.p

    def rec(i, acc):
        if i == len(basis):
            if any(a != 0 for a in acc):
                yield tuple(acc)
            return
        for c in range(p):
            new = [(a + c * b) % p for a, b in zip(acc, basis[i])]
            yield from rec(i + 1, new)

    yield from rec(0, [0] * len(basis[0]))


def _cyclic_module(F, B, v):
    basis = []
    cur = v
    while coordinates_in_basis(F, basis, cur) is None:
        basis.append(cur)
        cur = B.matvec(cur)
    return basis


class TestFieldFromMatrix:
    def test_spec_matrix_gives_f25(self):
        fld, iso = field_from_matrix(B_SPEC)
        assert fld.size == 25
        assert fld.modulus == Poly(F5, [1, 1, 1])
        assert iso.to_field(B_SPEC) == fld.gen()

    def test_scalar_gives_prime_field(self):
        fld, iso = field_from_matrix(Matrix(F5, [[2]]))
        assert isinstance(fld, PrimeField) and fld.p == 5
        assert iso.to_field(Matrix(F5, [[2]])) == 2

    def test_reducible_is_not_a_field(self):
        with pytest.raises(SdlpError, match="not a field"):
            field_from_matrix(Matrix(F5, [[1, 0], [0, 2]]))

    def test_iso_is_ring_homomorphism(self):
        fld, iso = field_from_matrix(B_SPEC)
        rng = random.Random(11)
        for _ in range(100):
            u, v = fld.rand(rng), fld.rand(rng)
            U, V = iso.from_field(u), iso.from_field(v)
            assert iso.to_field(U * V) == fld.mul(u, v)
            assert iso.to_field(U + V) == fld.add(u, v)


def test_solve_linear_consistency():
    rng = random.Random(5)
    for _ in range(100):
        F = PrimeField(7)
        r, c = rng.randrange(1, 5), rng.randrange(1, 5)
        M = Matrix(F, [[F.rand(rng) for _ in range(c)] for _ in range(r)])
        x = tuple(F.rand(rng) for _ in range(c))
        b = M.matvec(x)
        got = solve_linear(M, b)
        assert got is not None and M.matvec(got) == b
