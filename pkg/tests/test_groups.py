import random

import pytest

from sdlp.errors import SdlpError
from sdlp.ff import PrimeField, field_of_size
from sdlp.groups import (
    ConjugationEndo,
    CyclicGroup,
    HeisenbergGroup,
    Hom,
    LinearMapEndo,
    MatrixGroup,
    PairImageGroup,
    PowerMapEndo,
    ProductGroup,
    SolutionSet,
    TableEndo,
    VectorGroup,
    identity_hom,
    induced_automorphism,
    rho_pow,
    rho_pow_inverse_apply,
    rho_pow_naive,
    sigma_pow_apply,
)
from sdlp.linalg import Matrix
from sdlp.oracles import ensure_endo_order, orbit_index_period

F5 = PrimeField(5)
F7 = PrimeField(7)


def all_backends():
    F9 = field_of_size(9)
    return [
        CyclicGroup(8),
        CyclicGroup(1),
        VectorGroup(5, 2),
        VectorGroup(2, 3),
        HeisenbergGroup(7),
        MatrixGroup(F5, 2, [Matrix(F5, [[1, 1], [0, 1]]), Matrix(F5, [[2, 0], [0, 1]])]),
        MatrixGroup(F9, 2, [Matrix(F9, [[F9.gen(), F9.zero], [F9.zero, F9.one]])]),
        ProductGroup([CyclicGroup(6), VectorGroup(3, 2)]),
        PairImageGroup(Hom(HeisenbergGroup(5), VectorGroup(5, 2), lambda t: (t[0], t[1]))),
    ]


class TestBackendAxioms:
    @pytest.mark.parametrize("group", all_backends(), ids=lambda g: repr(g))
    def test_axioms_and_labels(self, group):
        rng = random.Random(0)
        e = group.identity
        for _ in range(40):
            x, y, z = (group.rand_element(rng) for _ in range(3))
            assert group.label(group.mul(group.mul(x, y), z)) == group.label(group.mul(x, group.mul(y, z)))
            assert group.is_identity(group.mul(x, group.inv(x)))
            assert group.label(group.mul(x, e)) == group.label(x)
            assert group.label(group.decode(group.encode(x))) == group.label(x)

    @pytest.mark.parametrize("group", all_backends(), ids=lambda g: repr(g))
    def test_codeword_bits_cover_group(self, group):
        order = group.order()
        if order is not None:
            assert (1 << group.codeword_bits) >= order

    @pytest.mark.parametrize("group", all_backends(), ids=lambda g: repr(g))
    def test_exponent_multiple_annihilates(self, group):
        rng = random.Random(1)
        from sdlp.integers import factorization_product

        m = factorization_product(group.exponent_multiple())
        for _ in range(10):
            x = group.rand_element(rng)
            assert group.is_identity(group.pow(x, m))


class TestHeisenberg:
    def test_matches_matrix_model(self):
        H = HeisenbergGroup(7)
        rng = random.Random(2)
        for _ in range(50):
            x, y = H.rand_element(rng), H.rand_element(rng)
            wanted = H.to_matrix(x) * H.to_matrix(y)
            assert H.to_matrix(H.mul(x, y)) == wanted
            assert H.to_matrix(H.inv(x)) == H.to_matrix(x).inverse()


class TestSigmaPowApply:
    def test_power_zero_is_identity(self):
        C = CyclicGroup(8)
        s = PowerMapEndo(C, 2)
        assert sigma_pow_apply(s, 0, 3) == 3

    def test_power_map_square(self):
        C = CyclicGroup(8)
        s = PowerMapEndo(C, 2)
        assert sigma_pow_apply(s, 2, 3) == 12 % 8

    def test_conjugation_cube(self):
        G = MatrixGroup(F5, 2, [Matrix(F5, [[1, 1], [0, 1]])])
        a = Matrix(F5, [[2, 1], [0, 3]])
        s = ConjugationEndo(G, a)
        x = Matrix(F5, [[1, 3], [0, 1]])
        expected = (a ** 3).inverse() * x * (a ** 3)
        assert sigma_pow_apply(s, 3, x) == expected

    def test_negative_power_rejected(self):
        C = CyclicGroup(8)
        with pytest.raises(SdlpError):
            sigma_pow_apply(PowerMapEndo(C, 2), -1, 1)


class TestRhoPow:
    def test_empty_product(self):
        V = VectorGroup(5, 1)
        s = PowerMapEndo(V, 2)
        assert rho_pow((1,), s, 0) == (0,)

    def test_single_factor(self):
        V = VectorGroup(5, 1)
        s = PowerMapEndo(V, 2)
        assert rho_pow((1,), s, 1) == (1,)

    def test_three_step_orbit(self):
        V = VectorGroup(5, 1)
        s = PowerMapEndo(V, 2)
        assert rho_pow((1,), s, 3) == (7 % 5,)

    def test_fast_equals_naive(self):
        rng = random.Random(3)
        cases = [
            (CyclicGroup(8), lambda g: PowerMapEndo(g, 2), 1),
            (CyclicGroup(12), lambda g: PowerMapEndo(g, 5), 7),
            (VectorGroup(5, 2), lambda g: LinearMapEndo(g, Matrix(F5, [[0, 4], [1, 4]])), (1, 0)),
            (HeisenbergGroup(7), lambda g: ConjugationEndo(g, Matrix(F7, [[2, 1, 3], [0, 3, 5], [0, 0, 1]])), (1, 2, 3)),
        ]
        for grp, mk, g in cases:
            sigma = mk(grp)
            for t in list(range(40)) + [rng.randrange(1 << 10) for _ in range(10)]:
                assert grp.label(rho_pow(g, sigma, t)) == grp.label(rho_pow_naive(g, sigma, t))

    def test_splitting_identity(self):
        # rho^{s+t}(1) = rho^s(1) * sigma^s(rho^t(1))
        rng = random.Random(4)
        H = HeisenbergGroup(5)
        sigma = ConjugationEndo(H, Matrix(PrimeField(5), [[1, 2, 0], [0, 2, 1], [0, 0, 3]]))
        g = (1, 1, 0)
        for _ in range(50):
            s, t = rng.randrange(1 << 10), rng.randrange(1 << 10)
            lhs = rho_pow(g, sigma, s + t)
            rhs = H.mul(rho_pow(g, sigma, s), sigma_pow_apply(sigma, s, rho_pow(g, sigma, t)))
            assert H.label(lhs) == H.label(rhs)

    def test_automorphism_orbit_is_pure_cycle(self):
        rng = random.Random(5)
        V = VectorGroup(5, 2)
        for _ in range(20):
            M = Matrix(F5, [[rng.randrange(5) for _ in range(2)] for _ in range(2)])
            if not M.is_invertible():
                continue
            sigma = LinearMapEndo(V, M)
            g = V.rand_element(rng)
            shape = orbit_index_period(g, sigma)
            assert shape.index == 0
            assert V.is_identity(rho_pow(g, sigma, shape.period))
            for t in range(1, shape.period):
                assert not V.is_identity(rho_pow(g, sigma, t))


class TestRhoPowInverse:
    def setup_method(self):
        self.V = VectorGroup(5, 2)
        self.sigma = LinearMapEndo(self.V, Matrix(F5, [[0, 4], [1, 4]]))
        ensure_endo_order(self.sigma)

    def test_s_zero_is_identity_map(self):
        assert rho_pow_inverse_apply((1, 0), self.sigma, 0, (1, 1)) == (1, 1)

    def test_defining_property(self):
        rng = random.Random(6)
        for _ in range(40):
            s = rng.randrange(1 << 8)
            h = self.V.rand_element(rng)
            w = rho_pow_inverse_apply((1, 0), self.sigma, s, h)
            assert self.V.label(rho_pow((1, 0), self.sigma, s)) == self.V.label(
                self.V.mul(rho_pow((1, 0), self.sigma, s), (0, 0))
            )
            # rho^s(w) = h
            back = self.V.mul(rho_pow((1, 0), self.sigma, s), sigma_pow_apply(self.sigma, s, w))
            assert self.V.label(back) == self.V.label(h)

    def test_spec_example(self):
        assert rho_pow_inverse_apply((1, 0), self.sigma, 2, (1, 1)) == (0, 0)

    def test_rejects_non_automorphism(self):
        V = VectorGroup(3, 2)
        singular = LinearMapEndo(V, Matrix(PrimeField(3), [[1, 0], [2, 0]]))
        with pytest.raises(SdlpError, match="not an automorphism"):
            rho_pow_inverse_apply((1, 0), singular, 1, (0, 0))


class TestTableEndo:
    def test_power_and_compose(self):
        C = CyclicGroup(8)
        t = TableEndo.from_callable(C, lambda x: 3 * x % 8)
        assert t.is_automorphism()
        assert t.pow(2).apply(1) == 9 % 8
        assert t.compose(t).apply(1) == t.pow(2).apply(1)

    def test_size_cap(self):
        with pytest.raises(SdlpError):
            TableEndo.from_callable(CyclicGroup(1 << 13), lambda x: x)


class TestInducedAutomorphism:
    def test_identity_hom_gives_pair_image(self):
        H = HeisenbergGroup(7)
        sigma = ConjugationEndo(H, Matrix(F7, [[2, 1, 3], [0, 3, 5], [0, 0, 1]]))
        img, ind = induced_automorphism(identity_hom(H), sigma)
        assert isinstance(img, PairImageGroup)
        rng = random.Random(8)
        for _ in range(30):
            x = H.rand_element(rng)
            assert img.label(ind.apply(img.embed(x))) == img.label(img.embed(sigma.apply(x)))

    def test_heisenberg_superdiagonal_gives_linear_map(self):
        H = HeisenbergGroup(7)
        sigma = ConjugationEndo(H, Matrix(F7, [[2, 1, 3], [0, 3, 5], [0, 0, 1]]))
        V = VectorGroup(7, 2)
        psi = Hom(H, V, lambda t: (t[0], t[1]), kernel_generators=[(0, 0, 1)])
        img, ind = induced_automorphism(psi, sigma)
        assert img is V and isinstance(ind, LinearMapEndo)
        rng = random.Random(9)
        for _ in range(100):
            x, y = H.rand_element(rng), H.rand_element(rng)
            assert V.label(psi(H.mul(x, y))) == V.label(V.mul(psi(x), psi(y)))
            assert V.label(ind.apply(psi(x))) == V.label(psi(sigma.apply(x)))

    def test_constant_hom_gives_trivial_image(self):
        H = HeisenbergGroup(5)
        sigma = ConjugationEndo(H, Matrix(PrimeField(5), [[1, 1, 0], [0, 1, 0], [0, 0, 1]]))
        V0 = VectorGroup(5, 0)
        psi = Hom(H, V0, lambda t: (), kernel_generators=list(H.generators()))
        img, ind = induced_automorphism(psi, sigma)
        assert img.label(ind.apply(())) == img.label(())

    def test_non_invariant_kernel_rejected(self):
        H = HeisenbergGroup(5)
        # swap-style table automorphism does not fix the center coordinate map
        V = VectorGroup(5, 1)
        sigma = ConjugationEndo(H, Matrix(PrimeField(5), [[1, 1, 0], [0, 1, 0], [0, 0, 1]]))
        psi = Hom(H, V, lambda t: (t[0],), kernel_generators=[(1, 0, 0)])
        with pytest.raises(Exception):
            induced_automorphism(psi, sigma)


class TestSolutionSet:
    def test_contains_and_affine(self):
        s = SolutionSet.progression(2, 3)
        assert s.contains(2) and s.contains(8) and not s.contains(4)
        mapped = s.map_affine(1, 2)
        assert mapped == SolutionSet.progression(5, 6)
        assert SolutionSet.singleton(4).map_affine(1, 2) == SolutionSet.singleton(9)
        assert SolutionSet.empty().map_affine(1, 2).is_empty()

    def test_explicit_upto(self):
        assert SolutionSet.progression(1, 4).explicit_upto(10) == [1, 5, 9]
        assert SolutionSet.singleton(3).explicit_upto(10) == [3]
        assert SolutionSet.empty().explicit_upto(10) == []

    def test_json(self):
        assert SolutionSet.empty().to_json() == {"kind": "empty"}
        assert SolutionSet.progression(1, 2).to_json() == {"kind": "progression", "t0": 1, "period": 2}
