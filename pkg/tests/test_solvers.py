import random

import pytest

from conftest import (
    rand_invertible,
    rand_upper_triangular,
    random_cyclic_instance,
    random_heisenberg_instance,
    random_matrix_instance,
    random_vector_instance,
    sigma_closed_matrix_group,
)
from sdlp.config import SolverConfig
from sdlp.errors import NotApplicableError, SdlpError
from sdlp.ff import Poly, PrimeField, field_of_size
from sdlp.groups import (
    ConjugationEndo,
    CyclicGroup,
    HeisenbergGroup,
    Hom,
    LinearMapEndo,
    MatrixGroup,
    PowerMapEndo,
    ProductEndo,
    ProductGroup,
    SdlpInstance,
    SolutionSet,
    TableEndo,
    VectorGroup,
    mulclose,
    rho_pow,
)
from sdlp.linalg import Matrix
from sdlp.oracles import orbit_walk
from sdlp.protocol import heisenberg_chain
from sdlp.solvers import (
    ChainLevel,
    NormalChain,
    OrbitProblemInstance,
    brute_solve,
    find_conjugator,
    solve,
    solve_elementary_abelian,
    solve_master,
    solve_matrix_inner,
    solve_orbit_problem,
    solve_small_order,
    solve_solvable,
)

F5 = PrimeField(5)
CFG = SolverConfig()


class TestSolveSmallOrder:
    def test_trivial_sigma_multiplicative(self):
        # <2> inside GL_1(F_101): rho^t(1) = 2^t, so h = 32 gives t = 5 mod 100
        F101 = PrimeField(101)
        G = MatrixGroup(F101, 1, [Matrix(F101, [[2]])])
        triv = ConjugationEndo(G, Matrix(F101, [[1]]))
        inst = SdlpInstance(G, triv, Matrix(F101, [[2]]), Matrix(F101, [[32]]))
        assert solve_small_order(inst, CFG) == SolutionSet.progression(5, 100)

    def test_identity_orbit(self):
        F101 = PrimeField(101)
        G = MatrixGroup(F101, 1, [Matrix(F101, [[2]])])
        triv = ConjugationEndo(G, Matrix(F101, [[1]]))
        inst = SdlpInstance(G, triv, G.identity, G.identity)
        assert solve_small_order(inst, CFG) == SolutionSet.progression(0, 1)

    def test_identity_g_nontrivial_h(self):
        F101 = PrimeField(101)
        G = MatrixGroup(F101, 1, [Matrix(F101, [[2]])])
        triv = ConjugationEndo(G, Matrix(F101, [[1]]))
        inst = SdlpInstance(G, triv, G.identity, Matrix(F101, [[2]]))
        assert solve_small_order(inst, CFG).is_empty()

    def test_order_bound(self):
        C = CyclicGroup(65537)
        sigma = PowerMapEndo(C, 3)  # huge multiplicative order
        inst = SdlpInstance(C, sigma, 1, 2)
        with pytest.raises(NotApplicableError, match="order too large"):
            solve_small_order(inst, SolverConfig(small_order_bound=8))

    def test_matches_brute(self):
        rng = random.Random(0)
        for _ in range(100):
            inst = random_cyclic_instance(rng, automorphism=True)
            assert solve_small_order(inst, CFG) == brute_solve(inst, CFG)


class TestSolveElementaryAbelian:
    def test_spec_orbit(self):
        V = VectorGroup(5, 2)
        B = LinearMapEndo(V, Matrix(F5, [[0, 4], [1, 4]]))
        inst = SdlpInstance(V, B, (1, 0), (1, 1))
        assert solve_elementary_abelian(inst, CFG) == SolutionSet.progression(2, 3)

    def test_zero_g_zero_h_is_everything(self):
        V = VectorGroup(5, 2)
        B = LinearMapEndo(V, Matrix(F5, [[0, 4], [1, 4]]))
        inst = SdlpInstance(V, B, (0, 0), (0, 0))
        assert solve_elementary_abelian(inst, CFG) == SolutionSet.progression(0, 1)

    def test_zero_g_nonzero_h_is_empty(self):
        V = VectorGroup(5, 2)
        B = LinearMapEndo(V, Matrix(F5, [[0, 4], [1, 4]]))
        inst = SdlpInstance(V, B, (0, 0), (1, 0))
        assert solve_elementary_abelian(inst, CFG).is_empty()

    def test_additive_doubling(self):
        V = VectorGroup(7, 1)
        triv = LinearMapEndo(V, Matrix(PrimeField(7), [[1]]))
        inst = SdlpInstance(V, triv, (3,), (6,))
        assert solve_elementary_abelian(inst, CFG).contains(2)

    def test_matches_brute(self):
        rng = random.Random(1)
        for _ in range(150):
            inst = random_vector_instance(rng, d_max=3, automorphism=True)
            assert solve_elementary_abelian(inst, CFG) == brute_solve(inst, CFG)

    def test_rejects_singular(self):
        V = VectorGroup(3, 2)
        singular = LinearMapEndo(V, Matrix(PrimeField(3), [[1, 0], [2, 0]]))
        with pytest.raises(SdlpError):
            solve_elementary_abelian(SdlpInstance(V, singular, (1, 0), (0, 0)), CFG)


class TestSolveSolvable:
    def test_prime_cyclic_delegates(self):
        C = CyclicGroup(13)
        sigma = PowerMapEndo(C, 5)
        inst = SdlpInstance(C, sigma, 3, 7)
        assert solve_solvable(inst, CFG) == brute_solve(inst, CFG)

    def test_heisenberg_forward_constructed(self):
        rng = random.Random(2)
        H = HeisenbergGroup(7)
        T = rand_upper_triangular(H.field, 3, rng)
        sigma = ConjugationEndo(H, T)
        g = H.rand_element(rng)
        h = rho_pow(g, sigma, 11)
        got = solve_solvable(SdlpInstance(H, sigma, g, h), CFG)
        assert got.contains(11)
        assert got == brute_solve(SdlpInstance(H, sigma, g, h), CFG)

    def test_coordinate_swap_on_z3_squared(self):
        V = VectorGroup(3, 2)
        swap = LinearMapEndo(V, Matrix(PrimeField(3), [[0, 1], [1, 0]]))
        inst = SdlpInstance(V, swap, (1, 0), (1, 1))
        got = solve_solvable(inst, CFG)
        assert got.contains(2) and got == brute_solve(inst, CFG)

    def test_unitriangular_4x4(self):
        rng = random.Random(3)
        F3 = PrimeField(3)
        gens = []
        for i in range(3):
            rows = [[F3.one if a == b else F3.zero for b in range(4)] for a in range(4)]
            rows[i][i + 1] = F3.one
            gens.append(Matrix(F3, rows))
        G = MatrixGroup(F3, 4, gens)
        T = rand_upper_triangular(F3, 4, rng)
        sigma = ConjugationEndo(G, T)
        g = G.rand_element(rng)
        h = rho_pow(g, sigma, 77)
        inst = SdlpInstance(G, sigma, g, h)
        got = solve_solvable(inst, CFG)
        assert got.contains(77)
        assert got == brute_solve(inst, SolverConfig(max_walk=1 << 18))

    def test_unitriangular_over_extension_field(self):
        rng = random.Random(13)
        F = field_of_size(9)
        d = 3
        gens = []
        for i in range(d - 1):
            rows = [[F.one if a == b else F.zero for b in range(d)] for a in range(d)]
            rows[i][i + 1] = F.one
            gens.append(Matrix(F, rows))
        rows = [[F.one if a == b else F.zero for b in range(d)] for a in range(d)]
        rows[0][1] = F.gen()
        gens.append(Matrix(F, rows))
        G = MatrixGroup(F, d, gens)
        T = rand_upper_triangular(F, d, rng)
        sigma = ConjugationEndo(G, T)
        g = G.rand_element(rng)
        h = rho_pow(g, sigma, 91)
        inst = SdlpInstance(G, sigma, g, h)
        got = solve_solvable(inst, SolverConfig(max_walk=1 << 16))
        assert got.contains(91)
        assert got == brute_solve(inst, SolverConfig(max_walk=1 << 16))

    def test_composition_series_required(self):
        C = CyclicGroup(12)  # composite: no built-in series
        inst = SdlpInstance(C, PowerMapEndo(C, 5), 1, 5)
        with pytest.raises(NotApplicableError, match="composition series required"):
            solve_solvable(inst, CFG)

    def test_random_heisenberg(self):
        rng = random.Random(4)
        for _ in range(50):
            inst = random_heisenberg_instance(rng, p_choices=(3, 5, 7))
            assert solve_solvable(inst, CFG) == brute_solve(inst, CFG)


class TestFindConjugator:
    def test_identity_automorphism(self):
        x = Matrix(F5, [[2, 0], [0, 2]])
        a = find_conjugator([x], [x], 2, F5, CFG)
        assert (a.inverse() * x * a).entries_key() == x.entries_key()

    def test_recovers_known_conjugation(self):
        x = Matrix(F5, [[1, 1], [0, 1]])
        c = Matrix(F5, [[2, 1], [0, 1]])
        image = c.inverse() * x * c
        a = find_conjugator([x], [image], 2, F5, CFG)
        assert (a.inverse() * x * a).entries_key() == image.entries_key()

    def test_diagonal_swap(self):
        x = Matrix(F5, [[2, 0], [0, 3]])
        swapped = Matrix(F5, [[3, 0], [0, 2]])
        a = find_conjugator([x], [swapped], 2, F5, CFG)
        assert (a.inverse() * x * a).entries_key() == swapped.entries_key()
        # the intertwiner is antidiagonal modulo the centralizer
        assert a.rows[0][0] == 0 and a.rows[1][1] == 0

    def test_not_inner_raises(self):
        # inversion on <x> with det(x)^2 != 1 is not a conjugation
        x = Matrix(F5, [[1, 1], [1, 3]])  # det 2
        with pytest.raises(NotApplicableError, match="no invertible intertwiner"):
            find_conjugator([x], [x.inverse()], 2, F5, CFG)

    def test_small_field_lift(self):
        F2 = PrimeField(2)
        x = Matrix(F2, [[1, 1], [0, 1]])
        c = Matrix(F2, [[1, 0], [1, 1]])
        image = c.inverse() * x * c
        a = find_conjugator([x], [image], 2, F2, CFG)
        embedded = Matrix(a.field, [[a.field.from_int(v) for v in row] for row in x.rows])
        target = Matrix(a.field, [[a.field.from_int(v) for v in row] for row in image.rows])
        assert (a.inverse() * embedded * a).entries_key() == target.entries_key()


class TestSolveOrbitProblem:
    COMP = Matrix.companion(Poly(F5, [1, 1, 1]))

    def test_b_equals_a(self):
        assert solve_orbit_problem(OrbitProblemInstance(F5, self.COMP, (1, 0), (1, 0)), CFG) == 0

    def test_b_is_phi_a(self):
        b = self.COMP.matvec((1, 0))
        assert solve_orbit_problem(OrbitProblemInstance(F5, self.COMP, (1, 0), b), CFG) == 1

    def test_exhaustive_small(self):
        cur = (1, 0)
        for t in range(25):
            got = solve_orbit_problem(OrbitProblemInstance(F5, self.COMP, (1, 0), cur), CFG)
            assert got == t % 3
            cur = self.COMP.matvec(cur)

    def test_no_solution(self):
        # b outside the Krylov space of a
        phi = Matrix(F5, [[1, 0], [0, 2]])
        got = solve_orbit_problem(OrbitProblemInstance(F5, phi, (1, 0), (0, 1)), CFG)
        assert got is None
        # exhaustive check over the full orbit
        cur = (1, 0)
        for _ in range(30):
            assert cur != (0, 1)
            cur = phi.matvec(cur)

    def test_krylov_dimension_bound_and_result_range(self):
        rng = random.Random(5)
        for _ in range(60):
            d = rng.randrange(1, 4)
            F = field_of_size(rng.choice([3, 5, 9]))
            phi = rand_invertible(F, d, rng)
            a = tuple(F.rand(rng) for _ in range(d))
            t_star = rng.randrange(200)
            b = (phi ** t_star).matvec(a)
            t = solve_orbit_problem(OrbitProblemInstance(F, phi, a, b), CFG)
            assert t is not None and (phi ** t).matvec(a) == b
            assert t <= t_star


class TestSolveMatrixInner:
    def test_inner_k1_forward(self):
        x = Matrix(F5, [[1, 1], [0, 1]])
        c = Matrix(F5, [[2, 1], [0, 1]])
        G, sigma = sigma_closed_matrix_group(F5, 2, [x], c)
        g = x
        h = rho_pow(g, sigma, 9)
        inst = SdlpInstance(G, sigma, g, h)
        got = solve_matrix_inner(inst, CFG)
        assert got.contains(9) and got == brute_solve(inst, CFG)

    def test_only_square_inner(self):
        # inversion on an abelian matrix group: x ~ x^{-1} fails when
        # det(x)^2 != 1, but sigma^2 = id is conjugation by I
        x = Matrix(F5, [[1, 1], [1, 3]])  # symmetric, det 2
        G = MatrixGroup(F5, 2, [x])
        sigma = TableEndo.from_callable(G, lambda m: m.inverse())
        cfg = SolverConfig()
        h = rho_pow(x, sigma, 7)
        inst = SdlpInstance(G, sigma, x, h)
        got = solve_matrix_inner(inst, cfg)
        assert got.contains(7) and got == brute_solve(inst, cfg)
        hits = [t for t in cfg.trace if t["kind"] == "matrix-inner"]
        assert hits and hits[-1]["k"] == 2

    def test_outside_orbit_is_empty(self):
        F3 = PrimeField(3)
        x = Matrix(F3, [[1, 1], [0, 1]])
        c = Matrix(F3, [[2, 1], [0, 1]])
        G, sigma = sigma_closed_matrix_group(F3, 2, [x], c)
        values, _, _ = orbit_walk(x, sigma, 1 << 12)
        labels = {G.label(v) for v in values}
        pool = mulclose(G, [x, Matrix(F3, [[2, 0], [0, 1]]), Matrix(F3, [[1, 0], [1, 1]])], cap=1 << 10)
        outside = next(m for m in pool if G.label(m) not in labels)
        inst = SdlpInstance(G, sigma, x, outside)
        assert solve_matrix_inner(inst, CFG).is_empty()
        assert brute_solve(inst, CFG).is_empty()

    def test_no_inner_power_within_bound(self):
        x = Matrix(F5, [[1, 1], [1, 3]])
        G = MatrixGroup(F5, 2, [x])
        sigma = TableEndo.from_callable(G, lambda m: m.inverse())
        inst = SdlpInstance(G, sigma, x, x)
        with pytest.raises(NotApplicableError, match="no inner power"):
            solve_matrix_inner(inst, SolverConfig(matrix_inner_max_k=1))

    def test_matches_brute(self):
        rng = random.Random(6)
        for _ in range(80):
            inst = random_matrix_instance(rng, d_max=2)
            try:
                want = brute_solve(inst, CFG)
            except NotApplicableError:
                continue
            assert solve_matrix_inner(inst, CFG) == want


class TestSolveMaster:
    def _mixed_product(self, seed=7):
        rng = random.Random(seed)
        F9 = field_of_size(9)
        xm = rand_invertible(F9, 2, rng)
        cm = rand_invertible(F9, 2, rng)
        GM, sig_m = sigma_closed_matrix_group(F9, 2, [xm], cm)
        V = VectorGroup(5, 2)
        Mv = rand_invertible(F5, 2, rng)
        P = ProductGroup([V, GM])
        sigma = ProductEndo(P, [LinearMapEndo(V, Mv), ConjugationEndo(GM, cm)])
        g = (V.rand_element(rng), GM.rand_element(rng))
        chain = NormalChain(
            levels=[
                ChainLevel(
                    generators=[P.embed(0, v) for v in V.generators()],
                    psi=Hom(P, VectorGroup(5, 2), lambda x: x[0], description="vector part"),
                    tag="solvable",
                ),
                ChainLevel(generators=P.generators(), psi=P.project_hom(1), tag="matrix-inner"),
            ]
        )
        return P, sigma, g, chain, rng

    def test_single_level_equals_solvable(self):
        from sdlp.groups import identity_hom

        rng = random.Random(8)
        H = HeisenbergGroup(5)
        T = rand_upper_triangular(H.field, 3, rng)
        sigma = ConjugationEndo(H, T)
        g, h = H.rand_element(rng), H.rand_element(rng)
        chain = NormalChain(
            levels=[
                ChainLevel(
                    generators=H.generators() + [(0, 0, 1)],
                    psi=identity_hom(H),
                    tag="solvable",
                )
            ]
        )
        inst = SdlpInstance(H, sigma, g, h)
        got = solve_master(inst, chain, CFG)
        want = solve_solvable(SdlpInstance(H, ConjugationEndo(H, T), g, h), CFG)
        assert got == want == brute_solve(inst, CFG)
        # and the standard two-level chain agrees as well
        assert solve_master(inst, heisenberg_chain(H), CFG) == want

    def test_two_decompositions_agree(self):
        rng = random.Random(9)
        for _ in range(25):
            H = HeisenbergGroup(7)
            T = rand_upper_triangular(H.field, 3, rng)
            sigma = ConjugationEndo(H, T)
            g, h = H.rand_element(rng), H.rand_element(rng)
            inst = SdlpInstance(H, sigma, g, h)
            chain = heisenberg_chain(H)
            a = solve_master(inst, chain, CFG)
            chain_small = heisenberg_chain(H)
            chain_small.levels[0].tag = "small"
            b = solve_master(inst, chain_small, CFG)
            c = brute_solve(inst, CFG)
            assert a == b == c

    def test_mixed_solvable_matrix_chain(self):
        P, sigma, g, chain, rng = self._mixed_product()
        h = rho_pow(g, sigma, 13)
        inst = SdlpInstance(P, sigma, g, h)
        got = solve_master(inst, chain, CFG)
        assert got.contains(13)
        assert got == brute_solve(inst, SolverConfig(max_walk=1 << 18))

    def test_level_error_is_attributed(self):
        H = HeisenbergGroup(5)
        T = Matrix(H.field, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        sigma = ConjugationEndo(H, T)
        chain = heisenberg_chain(H)
        chain.levels[1].tag = "matrix-inner"  # wrong tag for a vector image
        inst = SdlpInstance(H, sigma, (1, 0, 0), (1, 0, 0))
        with pytest.raises((SdlpError, NotApplicableError), match="chain level 2"):
            solve_master(inst, chain, CFG)


class TestAutoDispatch:
    def test_product_with_endomorphism_components(self):
        # componentwise reduction must kick in before the automorphism check
        rng = random.Random(20)
        F3 = PrimeField(3)
        for _ in range(40):
            C = CyclicGroup(rng.randrange(2, 24))
            V = VectorGroup(3, 2)
            P = ProductGroup([C, V])
            M = Matrix(F3, [[rng.randrange(3) for _ in range(2)] for _ in range(2)])
            sigma = ProductEndo(P, [PowerMapEndo(C, rng.randrange(C.n)), LinearMapEndo(V, M)])
            inst = SdlpInstance(P, sigma, P.rand_element(rng), P.rand_element(rng))
            assert solve(inst, CFG) == brute_solve(inst, CFG)

    def test_table_endomorphism_restriction(self):
        # non-bijective table: the stable-image restriction is re-tabulated
        rng = random.Random(21)
        for _ in range(40):
            n = rng.randrange(4, 48)
            C = CyclicGroup(n)
            e = rng.randrange(n)
            sigma = TableEndo.from_callable(C, lambda x, e=e: e * x % n)
            inst = SdlpInstance(C, sigma, C.rand_element(rng), C.rand_element(rng))
            assert solve(inst, CFG) == brute_solve(inst, CFG)

    def test_families_match_brute(self):
        rng = random.Random(10)
        makers = [
            lambda: random_cyclic_instance(rng),
            lambda: random_vector_instance(rng, automorphism=False, d_max=3),
            lambda: random_vector_instance(rng, automorphism=True, d_max=3),
            lambda: random_heisenberg_instance(rng, p_choices=(3, 5)),
            lambda: random_matrix_instance(rng, q_choices=(2, 3, 4, 5), d_max=2),
        ]
        for i in range(150):
            inst = makers[i % len(makers)]()
            try:
                want = brute_solve(inst, CFG)
            except NotApplicableError:
                continue
            assert solve(inst, CFG) == want

    def test_unknown_solver_rejected(self):
        rng = random.Random(11)
        inst = random_cyclic_instance(rng)
        with pytest.raises(SdlpError):
            solve(inst, CFG, solver="nonsense")
