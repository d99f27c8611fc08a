"""Base-case solvers (small order, elementary abelian, solvable, matrix
inner) and the master solver folding a chain of sigma-invariant normal
subgroups. Every returned SolutionSet is self-verified against the defining
equation before it leaves this module.
"""

import random
from dataclasses import dataclass

from . import integers
from .config import SolverConfig
from .errors import InternalAssertionError, NotApplicableError, SdlpError
from .ff import ExtField, PrimeField
from .groups import (
    ConjugationEndo,
    CyclicGroup,
    GroupHandle,
    HeisenbergGroup,
    Hom,
    LinearMapEndo,
    MatrixGroup,
    PairImageGroup,
    PowerMapEndo,
    ProductEndo,
    ProductGroup,
    SdlpInstance,
    SolutionSet,
    Subgroup,
    VectorGroup,
    rho_pow,
)
from .linalg import (
    Matrix,
    coordinates_in_basis,
    extract_basis,
    invariant_subspace,
    min_poly,
    nullspace,
    solve_linear,
)
from .oracles import (
    UnitGroup,
    dlog,
    element_order,
    ensure_endo_order,
    orbit_walk,
)
from .reductions import (
    recurse_through_quotient,
    reduce_to_automorphism_case,
    shift_to_power,
)


# ---------------------------------------------------------------------------
# chain data for the master solver


@dataclass
class ChainLevel:
    """One level M_i of a normal chain: generators, the homomorphism with
    kernel M_{i-1}, and the case tag deciding which solver takes the image."""

    generators: list
    psi: Hom
    tag: str  # small | small-order | solvable | matrix-inner
    n_hint: int | None = None


@dataclass
class NormalChain:
    """Levels bottom-up: levels[0] is M_1 (kernel = trivial group), the last
    entry is M_k = G."""

    levels: list

    def validate(self, group: GroupHandle, sigma):
        for i, level in enumerate(self.levels):
            tgt = level.psi.target
            below = self.levels[i - 1].generators if i > 0 else []
            for m in list(level.psi.kernel_generators) + list(below):
                if not tgt.is_identity(level.psi(m)):
                    raise SdlpError(f"chain level {i + 1}: kernel generator has nontrivial image")
            for x in level.generators:
                sigma.apply(x)  # raises if sigma is not defined on the level


# ---------------------------------------------------------------------------
# brute force (the oracle and the "Small" case)


def brute_solve(inst: SdlpInstance, config: SolverConfig | None = None) -> SolutionSet:
    """Exhaustive orbit walk; the reference answer for everything else."""
    config = config or SolverConfig()
    values, index, period = orbit_walk(inst.g, inst.sigma, config.max_walk)
    want = inst.group.label(inst.h)
    for t, v in enumerate(values):
        if inst.group.label(v) == want:
            if t < index:
                return SolutionSet.singleton(t)
            return SolutionSet.progression(t, period)
    return SolutionSet.empty()


# ---------------------------------------------------------------------------
# Case (1): small-order automorphisms


def solve_small_order(inst: SdlpInstance, config: SolverConfig | None = None) -> SolutionSet:
    """Shift to sigma^n with n = ord(sigma); each residue instance has a
    trivial endomorphism, so rho^t(1) = g'^t and a dlog finishes it."""
    config = config or SolverConfig()
    sigma = inst.sigma
    if not sigma.is_automorphism():
        raise SdlpError("not an automorphism")
    n = ensure_endo_order(sigma)
    if n > config.small_order_bound:
        raise NotApplicableError("automorphism order too large")
    subs, recombine = shift_to_power(inst, n, config)
    sols = [_solve_trivial_sigma(sub, config) for sub in subs]
    return _verified(inst, recombine(sols))


def _solve_trivial_sigma(inst: SdlpInstance, config: SolverConfig) -> SolutionSet:
    """SDLP when sigma acts as the identity: h = g^t."""
    grp = inst.group
    if grp.is_identity(inst.g):
        return SolutionSet.progression(0, 1) if grp.is_identity(inst.h) else SolutionSet.empty()
    ord_g, fact = element_order(grp, inst.g)
    t0 = dlog(grp, inst.g, inst.h, factored_order=fact, config=config)
    if t0 is None:
        return SolutionSet.empty()
    return SolutionSet.progression(t0, ord_g)


# ---------------------------------------------------------------------------
# Case (2a): elementary abelian groups


def solve_elementary_abelian(inst: SdlpInstance, config: SolverConfig | None = None) -> SolutionSet:
    """SDLP on Z_p^d with an invertible linear sigma.

    Reducible modules are split along a minimal invariant subspace and
    recursed through the quotient; the irreducible base case becomes a
    discrete logarithm in F_{p^d}^* via the matrix-algebra field.
    """
    config = config or SolverConfig()
    grp, sigma = inst.group, inst.sigma
    if not isinstance(grp, VectorGroup):
        raise NotApplicableError("elementary-abelian solver needs a vector group")
    if isinstance(sigma, PowerMapEndo):
        F = PrimeField(grp.p)
        sigma = LinearMapEndo(grp, Matrix.identity(F, grp.d).scale(sigma.e))
        inst = SdlpInstance(grp, sigma, inst.g, inst.h)
    if not isinstance(sigma, LinearMapEndo):
        raise NotApplicableError("elementary-abelian solver needs a linear map")
    if not sigma.is_automorphism():
        raise SdlpError("sigma is singular; reduce to the automorphism case first")
    return _verified(inst, _solve_elem_abelian_rec(inst, config))


def _solve_elem_abelian_rec(inst: SdlpInstance, config: SolverConfig) -> SolutionSet:
    grp: VectorGroup = inst.group
    B = inst.sigma.matrix
    F = B.field
    d = grp.d
    if d == 0:
        return SolutionSet.progression(0, 1)
    m = min_poly(B)
    W = invariant_subspace(B, [tuple(F.one if i == j else F.zero for j in range(d)) for i in range(d)], seed=config.seed)
    if W is None:
        return _solve_elem_abelian_irreducible(inst, m, config)

    # split: quotient by the minimal invariant subspace W, then descend
    psi = _quotient_hom(grp, B, W)
    q_inst, follow = recurse_through_quotient(inst, psi, config)
    q_sol = _solve_elem_abelian_rec(q_inst, config)
    sub, lift = follow(q_sol)
    if sub is None:
        return lift(None)
    w_inst = _vector_subinstance(sub, W, F)
    return lift(_solve_elem_abelian_rec(w_inst, config))


def _quotient_hom(grp: VectorGroup, B: Matrix, W: list) -> Hom:
    """The coordinate map Z_p^d -> Z_p^{d-w} with kernel span(W)."""
    F = B.field
    d = grp.d
    basis = list(W)
    for e in Matrix.identity(F, d).rows:
        if len(basis) == d:
            break
        if coordinates_in_basis(F, basis, e) is None:
            basis.append(tuple(e))
    L = Matrix.from_columns(F, basis)
    L_inv = L.inverse()
    w = len(W)
    proj = Matrix(F, L_inv.rows[w:])
    target = VectorGroup(grp.p, d - w)
    return Hom(grp, target, proj.matvec, kernel_generators=list(W), description="mod minimal invariant subspace")


def _vector_subinstance(sub: SdlpInstance, W: list, F) -> SdlpInstance:
    """Rewrite an instance living inside span(W) in W-coordinates."""
    w = len(W)
    target = VectorGroup(F.p, w)
    B_n0 = sub.sigma.matrix
    R_cols = []
    for v in W:
        c = coordinates_in_basis(F, W, B_n0.matvec(v))
        if c is None:
            raise InternalAssertionError("subspace is not invariant under the shifted map")
        R_cols.append(c)
    R = Matrix.from_columns(F, R_cols)
    g2 = coordinates_in_basis(F, W, sub.g)
    h2 = coordinates_in_basis(F, W, sub.h)
    if g2 is None or h2 is None:
        raise InternalAssertionError("follow-up elements are not inside the subspace")
    return SdlpInstance(target, LinearMapEndo(target, R), g2, h2)


def _solve_elem_abelian_irreducible(inst: SdlpInstance, m, config: SolverConfig) -> SolutionSet:
    grp: VectorGroup = inst.group
    B = inst.sigma.matrix
    F = B.field
    p = grp.p
    if B.is_identity():
        # 1 is an eigenvalue; irreducibility forces d = 1 and sigma trivial
        g0 = inst.g[0] if grp.d else 0
        h0 = inst.h[0] if grp.d else 0
        if g0 == 0:
            return SolutionSet.progression(0, 1) if h0 == 0 else SolutionSet.empty()
        return SolutionSet.progression(h0 * F.inv(g0) % p, p)
    if all(a == 0 for a in inst.g):
        return SolutionSet.progression(0, 1) if all(a == 0 for a in inst.h) else SolutionSet.empty()

    # view V as the field F_{p^d}: g becomes 1, h becomes u, B becomes beta
    basis = [inst.g]
    for _ in range(grp.d - 1):
        basis.append(B.matvec(basis[-1]))
    coords = coordinates_in_basis(F, basis, inst.h)
    if coords is None:
        raise InternalAssertionError("cyclic basis failed to span an irreducible module")
    if m.degree() == 1:
        fld = F
        beta = F.neg(m.coeffs[0])  # root of x - b
        u = coords[0]
    else:
        fld = ExtField(F, m)
        beta = fld.gen()
        u = fld.from_coeffs(list(coords))
    # rho^t(1) = h  <=>  beta^t = 1 + (beta - 1) u
    target = fld.add(fld.one, fld.mul(fld.sub(beta, fld.one), u))
    if target == fld.zero:
        return SolutionSet.empty()
    units = UnitGroup(fld)
    ord_beta, fact = element_order(units, beta)
    t0 = dlog(units, beta, target, factored_order=fact, config=config)
    if t0 is None:
        return SolutionSet.empty()
    return SolutionSet.progression(t0, ord_beta)


# ---------------------------------------------------------------------------
# Case (2): solvable groups


@dataclass
class _GradedLevel:
    dim: int
    extract: object  # elem -> coordinate tuple
    build: object  # coordinate tuple -> elem


def _graded_levels(group: GroupHandle):
    """Coordinate filtration for the built-in solvable families."""
    if isinstance(group, HeisenbergGroup):
        return [
            _GradedLevel(2, lambda x: (x[0], x[1]), lambda v: (v[0] % group.p, v[1] % group.p, 0)),
            _GradedLevel(1, lambda x: (x[2],), lambda v: (0, 0, v[0] % group.p)),
        ]
    if isinstance(group, MatrixGroup):
        if not all(_is_unitriangular(g) for g in group.generators()):
            return None
        d = group.d
        F = group.field
        e = F.degree  # each entry flattens to e prime-field coordinates
        levels = []
        for k in range(1, d):
            idx = [(i, i + k) for i in range(d - k)]

            def extract(M, idx=idx, F=F):
                out = []
                for i, j in idx:
                    out.extend(F.to_prime_coeffs(M.rows[i][j]))
                return tuple(out)

            def build(v, idx=idx, F=F, d=d, e=e):
                rows = [[F.one if a == b else F.zero for b in range(d)] for a in range(d)]
                for pos, (i, j) in enumerate(idx):
                    rows[i][j] = F.from_prime_coeffs(v[pos * e : (pos + 1) * e])
                return Matrix(F, rows)

            levels.append(_GradedLevel(len(idx) * e, extract, build))
        return levels
    return None


def _is_unitriangular(M: Matrix) -> bool:
    F = M.field
    for i in range(M.nrows):
        for j in range(i + 1):
            want = F.one if i == j else F.zero
            if M.rows[i][j] != want:
                return False
    return True


def solve_solvable(inst: SdlpInstance, config: SolverConfig | None = None) -> SolutionSet:
    """SDLP on a solvable group with built-in composition structure.

    Supported: elementary abelian groups (delegated), cyclic groups of
    prime order, Heisenberg groups, full upper-unitriangular matrix groups
    over a prime field, and pair-image groups with a vector-group labeling.
    Each filtration level maps onto Z_p^r, is solved by the
    elementary-abelian solver, and the recursion descends into the kernel
    with the shifted automorphism. Anything else needs an explicit chain
    (solve_master) and raises "composition series required".
    """
    config = config or SolverConfig()
    grp, sigma = inst.group, inst.sigma
    if not sigma.is_automorphism():
        raise SdlpError("not an automorphism")
    if isinstance(grp, VectorGroup):
        return solve_elementary_abelian(inst, config)
    if isinstance(grp, CyclicGroup):
        if not integers.is_prime(grp.n):
            raise NotApplicableError("composition series required")
        return _verified(inst, _solve_prime_cyclic(inst, config))
    if isinstance(grp, PairImageGroup) and isinstance(grp.target, VectorGroup):
        return _verified(inst, _solve_pair_over_vector(inst, config))
    if isinstance(grp, PairImageGroup) and grp.hom.is_identity:
        # labels coincide with inner elements; solve the inner instance
        from .groups import InducedPairEndo

        if isinstance(sigma, InducedPairEndo):
            base = grp.inner
            while isinstance(base, Subgroup):
                base = base.parent
            inner = SdlpInstance(base, sigma.inner, inst.g[0], inst.h[0])
            return _verified(inst, solve_solvable(inner, config))
    levels = _graded_levels(grp)
    if levels is None:
        raise NotApplicableError("composition series required")
    if isinstance(grp, MatrixGroup) and not isinstance(sigma, ConjugationEndo):
        raise NotApplicableError("composition series required")
    ensure_endo_order(sigma)
    return _verified(inst, _solve_graded(inst, levels, config))


def _solve_prime_cyclic(inst: SdlpInstance, config: SolverConfig) -> SolutionSet:
    grp: CyclicGroup = inst.group
    F = PrimeField(grp.n)
    V = VectorGroup(grp.n, 1)
    e = inst.sigma.e if isinstance(inst.sigma, PowerMapEndo) else None
    if e is None:
        # generic automorphism of Z_p is multiplication by sigma(1)
        e = inst.sigma.apply(1 % grp.n)
    sub = SdlpInstance(V, LinearMapEndo(V, Matrix(F, [[e]])), (inst.g,), (inst.h,))
    return _solve_elem_abelian_rec(sub, config)


def _solve_pair_over_vector(inst: SdlpInstance, config: SolverConfig) -> SolutionSet:
    """Labels are vectors, so the label map is an injective-on-image hom and
    the quotient instance is the whole problem."""
    grp: PairImageGroup = inst.group
    tgt: VectorGroup = grp.target
    F = PrimeField(tgt.p)
    gens = grp.generators()
    vecs = [grp.hom(x[0]) for x in gens]
    basis = extract_basis(F, vecs)
    r = len(basis)
    Vr = VectorGroup(tgt.p, r)
    if r == 0:
        proj = Hom(grp, Vr, lambda x: (), description="trivial image")
    else:
        L = Matrix.from_columns(F, basis)

        def func(x, L=L):
            c = solve_linear(L, x[1])
            if c is None:
                raise InternalAssertionError("pair label outside the image span")
            return c

        proj = Hom(grp, Vr, func, description="image coordinates")
    q_inst, follow = recurse_through_quotient(inst, proj, config)
    q_sol = _solve_elem_abelian_rec(q_inst, config)
    # proj is injective on labels: the quotient answers the whole instance
    return q_sol


def _solve_graded(inst: SdlpInstance, levels, config: SolverConfig) -> SolutionSet:
    grp, sigma = inst.group, inst.sigma
    F = PrimeField(grp.p if hasattr(grp, "p") else grp.field.p)
    p = F.p
    builders = [
        [lev.build(tuple(1 if i == j else 0 for j in range(lev.dim))) for i in range(lev.dim)]
        for lev in levels
    ]
    cur = inst
    lifts = []
    for li, lev in enumerate(levels):
        deeper = [b for lvl in builders[li + 1 :] for b in lvl]
        source = Subgroup(grp, builders[li] + deeper)
        _check_filtration(grp, sigma, levels, li, builders, config)
        target = VectorGroup(p, lev.dim)
        psi = Hom(
            source,
            target,
            lambda x, lev=lev: tuple(a % p for a in lev.extract(x)),
            kernel_generators=deeper,
            description=f"filtration level {li + 1}",
        )
        q_inst, follow = recurse_through_quotient(cur, psi, config)
        if not q_inst.sigma.is_automorphism():
            raise NotApplicableError("automorphism does not act invertibly on a filtration layer")
        q_sol = _solve_elem_abelian_rec(q_inst, config)
        sub, lift = follow(q_sol)
        lifts.append(lift)
        if sub is None:
            cur = None
            break
        cur = sub
    if cur is None:
        base = SolutionSet.empty()
    else:
        if not cur.group.is_identity(cur.g):
            raise InternalAssertionError("descent did not reach the trivial group on g")
        base = SolutionSet.progression(0, 1) if cur.group.is_identity(cur.h) else SolutionSet.empty()
    for lift in reversed(lifts):
        base = lift(base)
    return base


def _check_filtration(grp, sigma, levels, li, builders, config):
    """sigma must keep each filtration layer inside itself."""
    p = grp.p if hasattr(grp, "p") else grp.field.p
    for b in builders[li]:
        img = sigma.apply(b)
        for shallower in range(li):
            if any(a % p for a in levels[shallower].extract(img)):
                raise NotApplicableError("automorphism does not preserve the coordinate filtration")


# ---------------------------------------------------------------------------
# Case (3): matrix groups with an inner power


def find_conjugator(generators, images, d: int, fld, config: SolverConfig | None = None) -> Matrix:
    """A matrix a with a^-1 x a = sigma(x) for every generator x.

    Computes the intertwiner space {y : y x_i = sigma(x_i) y} and draws
    seeded-random elements until one is invertible; by Schwartz-Zippel a
    draw succeeds with probability >= 1 - d/q once any invertible
    intertwiner exists. Fields with q < 2d are lifted to an extension
    (prime q) or searched exhaustively (small prime-power q).
    """
    a, _, _ = _find_conjugator_lifted(generators, images, d, fld, config or SolverConfig())
    return a


def _find_conjugator_lifted(generators, images, d: int, fld, config: SolverConfig):
    """(a, field, embed) where embed maps input matrices into a's field."""
    if fld.size >= 2 * d or not isinstance(fld, PrimeField):
        lifted, embed = fld, lambda M: M
        if fld.size < 2 * d:
            return _conjugator_by_enumeration(generators, images, d, fld, config)
    else:
        e = 1
        while fld.size**e < 2 * d:
            e += 1
        from .ff import canonical_irreducible

        lifted = ExtField(fld, canonical_irreducible(fld, e))

        def embed(M, lifted=lifted):
            return Matrix(lifted, [[lifted.from_int(v) for v in row] for row in M.rows])

    gens = [embed(x) for x in generators]
    imgs = [embed(x) for x in images]
    basis = _intertwiner_basis(gens, imgs, d, lifted)
    if not basis:
        raise NotApplicableError("no invertible intertwiner found")
    rng = random.Random(f"conjugator-{config.seed}")
    for _ in range(32):
        y = Matrix.zeros(lifted, d, d)
        for Y in basis:
            y = y + Y.scale(lifted.rand(rng))
        if y.is_invertible():
            a = y.inverse()
            _assert_conjugation_matches(gens, imgs, a)
            return a, lifted, embed
    raise NotApplicableError("no invertible intertwiner found")


def _conjugator_by_enumeration(generators, images, d, fld, config):
    basis = _intertwiner_basis(generators, images, d, fld)
    if not basis:
        raise NotApplicableError("no invertible intertwiner found")
    if fld.size ** len(basis) > 1 << 18:
        raise NotApplicableError("intertwiner space too large to enumerate over a tiny field")
    for coeffs in _tuples(fld, len(basis)):
        y = Matrix.zeros(fld, d, d)
        for c, Y in zip(coeffs, basis):
            y = y + Y.scale(c)
        if any(c != fld.zero for c in coeffs) and y.is_invertible():
            a = y.inverse()
            _assert_conjugation_matches(generators, images, a)
            return a, fld, (lambda M: M)
    raise NotApplicableError("no invertible intertwiner found")


def _tuples(fld, n):
    if n == 0:
        yield ()
        return
    for rest in _tuples(fld, n - 1):
        for v in fld.elements():
            yield rest + (v,)


def _intertwiner_basis(gens, imgs, d, fld):
    """Basis of {y : y x = sigma(x) y for all generators}, as matrices."""
    rows = []
    for x, s in zip(gens, imgs):
        for r in range(d):
            for c in range(d):
                row = [fld.zero] * (d * d)
                for k in range(d):
                    row[r * d + k] = fld.add(row[r * d + k], x.rows[k][c])
                for k in range(d):
                    row[k * d + c] = fld.sub(row[k * d + c], s.rows[r][k])
                rows.append(row)
    if not rows:
        return [Matrix.identity(fld, d)]
    system = Matrix(fld, rows)
    return [Matrix.unflatten(fld, v, d, d) for v in nullspace(system)]


def _assert_conjugation_matches(gens, imgs, a: Matrix):
    a_inv = a.inverse()
    for x, s in zip(gens, imgs):
        if (a_inv * x * a).entries_key() != s.entries_key():
            raise InternalAssertionError("conjugator does not implement sigma on the generators")


@dataclass
class OrbitProblemInstance:
    """Decide b = Phi^t a for an invertible linear map Phi on F_q^n."""

    field: object
    phi: Matrix
    a: tuple
    b: tuple


def solve_orbit_problem(opi: OrbitProblemInstance, config: SolverConfig | None = None):
    """Smallest t >= 0 with Phi^t a = b, or None.

    Kannan-Lipton style: build the Krylov space W of a, restrict Phi to W
    (companion matrix A in the Krylov basis), check membership of b, and
    solve the Matrix Power Problem A^t = B by dlog in <A>.
    """
    sol = _orbit_problem_set(opi, config or SolverConfig())
    if sol.is_empty():
        return None
    return sol.smallest()


def _orbit_problem_set(opi: OrbitProblemInstance, config: SolverConfig) -> SolutionSet:
    F = opi.field
    if all(a == F.zero for a in opi.a):
        if all(b == F.zero for b in opi.b):
            return SolutionSet.progression(0, 1)
        return SolutionSet.empty()
    if not opi.phi.is_invertible():
        raise SdlpError("orbit problem needs an invertible map")
    krylov = [opi.a]
    cur = opi.phi.matvec(opi.a)
    while coordinates_in_basis(F, krylov, cur) is None:
        krylov.append(cur)
        cur = opi.phi.matvec(cur)
    j = len(krylov)
    dep = coordinates_in_basis(F, krylov, cur)
    cols = []
    for i in range(1, j):
        cols.append(tuple(F.one if r == i else F.zero for r in range(j)))
    cols.append(dep)
    A = Matrix.from_columns(F, cols)
    c_b = coordinates_in_basis(F, krylov, opi.b)
    if c_b is None:
        return SolutionSet.empty()
    B_cols = [c_b]
    for _ in range(j - 1):
        B_cols.append(A.matvec(B_cols[-1]))
    B_mat = Matrix.from_columns(F, B_cols)
    handle = MatrixGroup(F, j, [])
    ord_A, fact = element_order(handle, A)
    t = dlog(handle, A, B_mat, factored_order=fact, config=config)
    if t is None:
        return SolutionSet.empty()
    if (opi.phi**t).matvec(opi.a) != tuple(opi.b):
        raise InternalAssertionError("orbit problem self-verification failed")
    return SolutionSet.progression(t, ord_A)


def _matrix_view(inst: SdlpInstance):
    """(field, d, to_matrix) for matrix-backed instances, raw or pair-encoded."""
    grp = inst.group
    if isinstance(grp, MatrixGroup):
        return grp.field, grp.d, (lambda x: x)
    if isinstance(grp, PairImageGroup) and isinstance(grp.target, MatrixGroup):
        return grp.target.field, grp.target.d, (lambda x: x[1])
    if isinstance(grp, Subgroup) and isinstance(grp.parent, MatrixGroup):
        return grp.parent.field, grp.parent.d, (lambda x: x)
    raise NotApplicableError("matrix-inner solver needs a matrix-backed group")


def solve_matrix_inner(inst: SdlpInstance, config: SolverConfig | None = None) -> SolutionSet:
    """SDLP on a matrix group when some power sigma^k (k | ord(sigma),
    k <= the configured bound) is conjugation by a matrix.

    Divisors are scanned in increasing order; on a hit, the instance is
    shifted to sigma^k and each residue instance becomes an Orbit Problem
    for the linear extension Phi = (left multiplication by g') o sigma^k
    on the full matrix space.
    """
    config = config or SolverConfig()
    sigma = inst.sigma
    if not sigma.is_automorphism():
        raise SdlpError("not an automorphism")
    fld, d, to_mat = _matrix_view(inst)
    gens = inst.group.generators()
    gen_mats = [to_mat(x) for x in gens]
    n = ensure_endo_order(sigma)
    max_k = config.matrix_inner_max_k
    for k in integers.divisors_ascending(sigma.cached_order_factored or integers.factorize(n)):
        if k > max_k:
            break
        sigma_k = sigma.pow(k)
        img_mats = [to_mat(sigma_k.apply(x)) for x in gens]
        try:
            a, lifted, embed = _find_conjugator_lifted(gen_mats, img_mats, d, fld, config)
        except NotApplicableError:
            continue
        config.record("matrix-inner", k=k, lifted=repr(lifted) if lifted is not fld else None)
        return _verified(inst, _solve_with_conjugator(inst, k, a, lifted, embed, to_mat, d, config))
    raise NotApplicableError("no inner power within bound")


def _solve_with_conjugator(inst, k, a, fld, embed, to_mat, d, config) -> SolutionSet:
    subs, recombine = shift_to_power(inst, k, config)
    a_inv = a.inverse()
    basis_mats = []
    for i in range(d):
        for j in range(d):
            E = [[fld.zero] * d for _ in range(d)]
            E[i][j] = fld.one
            basis_mats.append(Matrix(fld, E))
    sols = []
    for sub in subs:
        g_mat = embed(to_mat(sub.g))
        cols = [(g_mat * (a_inv * E * a)).flatten() for E in basis_mats]
        phi = Matrix.from_columns(fld, cols)
        opi = OrbitProblemInstance(
            fld,
            phi,
            Matrix.identity(fld, d).flatten(),
            embed(to_mat(sub.h)).flatten(),
        )
        sols.append(_orbit_problem_set(opi, config))
    return recombine(sols)


# ---------------------------------------------------------------------------
# the master solver


def solve_master(inst: SdlpInstance, chain: NormalChain, config: SolverConfig | None = None) -> SolutionSet:
    """Fold the quotient recursion down a chain of sigma-invariant normal
    subgroups, dispatching each image instance by its case tag."""
    config = config or SolverConfig()
    if not inst.sigma.is_automorphism():
        raise SdlpError("not an automorphism")
    chain.validate(inst.group, inst.sigma)
    ensure_endo_order(inst.sigma)
    cur = inst
    lifts = []
    for level_index in range(len(chain.levels) - 1, -1, -1):
        level = chain.levels[level_index]
        psi = _rebind_level_hom(inst.group, chain, level_index)
        try:
            q_inst, follow = recurse_through_quotient(cur, psi, config)
            q_sol = _dispatch_tag(q_inst, level, config)
            sub, lift = follow(q_sol)
        except (SdlpError, NotApplicableError) as err:
            raise type(err)(f"chain level {level_index + 1}: {err}") from err
        lifts.append(lift)
        if sub is None:
            cur = None
            break
        cur = sub
    if cur is None:
        base = SolutionSet.empty()
    else:
        if not cur.group.is_identity(cur.g):
            raise InternalAssertionError("chain descent did not trivialize g")
        base = SolutionSet.progression(0, 1) if cur.group.is_identity(cur.h) else SolutionSet.empty()
    for lift in reversed(lifts):
        base = lift(base)
    return _verified(inst, base)


def _rebind_level_hom(group, chain: NormalChain, level_index: int) -> Hom:
    """View the level hom as defined on M_i with kernel M_{i-1}, using the
    chain's own generator data."""
    level = chain.levels[level_index]
    source = Subgroup(group, level.generators)
    kernel = chain.levels[level_index - 1].generators if level_index > 0 else []
    return Hom(
        source,
        level.psi.target,
        level.psi,
        kernel_generators=kernel or level.psi.kernel_generators,
        description=level.psi.description,
        is_identity=level.psi.is_identity,
    )


def _dispatch_tag(q_inst: SdlpInstance, level: ChainLevel, config: SolverConfig) -> SolutionSet:
    tag = level.tag
    if tag == "small":
        return brute_solve(q_inst, config)
    if tag == "small-order":
        return solve_small_order(q_inst, config)
    if tag == "solvable":
        return solve_solvable(q_inst, config)
    if tag == "matrix-inner":
        cfg = config
        if level.n_hint:
            from dataclasses import replace

            cfg = replace(config, matrix_inner_max_k=level.n_hint, trace=config.trace)
        return solve_matrix_inner(q_inst, cfg)
    raise SdlpError(f"unknown chain tag {tag!r}")


# ---------------------------------------------------------------------------
# dispatch


SOLVER_NAMES = ("auto", "brute", "small-order", "elem-abelian", "solvable", "matrix-inner", "master")


def solve(inst: SdlpInstance, config: SolverConfig | None = None, solver: str = "auto") -> SolutionSet:
    """Entry point: dispatch an instance to a solver path and verify."""
    config = config or SolverConfig()
    if solver == "brute":
        return _verified(inst, brute_solve(inst, config))
    if solver == "small-order":
        return solve_small_order(inst, config)
    if solver == "elem-abelian":
        return solve_elementary_abelian(inst, config)
    if solver == "solvable":
        return solve_solvable(inst, config)
    if solver == "matrix-inner":
        return solve_matrix_inner(inst, config)
    if solver == "master":
        if inst.chain is None:
            raise SdlpError("master solver needs a chain")
        return solve_master(inst, inst.chain, config)
    if solver != "auto":
        raise SdlpError(f"unknown solver {solver!r}")
    return _solve_auto(inst, config)


def _solve_auto(inst: SdlpInstance, config: SolverConfig) -> SolutionSet:
    sigma = inst.sigma
    grp = inst.group
    if inst.chain is not None and sigma.is_automorphism():
        return solve_master(inst, inst.chain, config)
    if isinstance(grp, ProductGroup) and isinstance(sigma, ProductEndo):
        # componentwise even for endomorphisms: rho acts per factor
        return _verified(inst, _solve_product(inst, config))
    if not sigma.is_automorphism():
        sub, recombine = reduce_to_automorphism_case(inst, config)
        return _verified(inst, recombine(_solve_auto(sub, config)))
    if isinstance(grp, VectorGroup):
        return solve_elementary_abelian(inst, config)
    if isinstance(grp, CyclicGroup) and integers.is_prime(grp.n):
        return solve_solvable(inst, config)
    if isinstance(grp, HeisenbergGroup):
        return solve_solvable(inst, config)
    if isinstance(grp, PairImageGroup) and isinstance(grp.target, VectorGroup):
        return solve_solvable(inst, config)
    if isinstance(grp, MatrixGroup):
        n = ensure_endo_order(sigma)
        if n <= config.small_order_bound and _cheap_order_estimate(grp) is not None:
            try:
                return solve_small_order(inst, config)
            except (NotApplicableError, SdlpError):
                pass
        return solve_matrix_inner(inst, config)
    try:
        return solve_small_order(inst, config)
    except (NotApplicableError, SdlpError):
        return _verified(inst, brute_solve(inst, config))


def _cheap_order_estimate(grp):
    try:
        return grp.exponent_multiple()
    except (SdlpError, NotImplementedError):
        return None


def _solve_product(inst: SdlpInstance, config: SolverConfig) -> SolutionSet:
    """Componentwise solve on a direct product: intersect the factors'
    solution sets."""
    grp: ProductGroup = inst.group
    sols = []
    for i, (factor, endo) in enumerate(zip(grp.factors, inst.sigma.components)):
        sub = SdlpInstance(factor, endo, inst.g[i], inst.h[i])
        sols.append(_solve_auto(sub, config))
    return _intersect_solutions(sols)


def _intersect_solutions(sols) -> SolutionSet:
    cur = None
    for sol in sols:
        if sol.is_empty():
            return SolutionSet.empty()
        cur = sol if cur is None else _intersect_two(cur, sol)
        if cur.is_empty():
            return cur
    return cur if cur is not None else SolutionSet.progression(0, 1)


def _intersect_two(a: SolutionSet, b: SolutionSet) -> SolutionSet:
    if a.kind == "singleton":
        return a if b.contains(a.t0) else SolutionSet.empty()
    if b.kind == "singleton":
        return b if a.contains(b.t0) else SolutionSet.empty()
    # both progressions: solve t = a.t0 (mod a.period), t = b.t0 (mod b.period)
    import math

    g = math.gcd(a.period, b.period)
    if (a.t0 - b.t0) % g != 0:
        return SolutionSet.empty()
    lcm = a.period // g * b.period
    # CRT for non-coprime moduli
    diff = (b.t0 - a.t0) // g
    inv = pow(a.period // g, -1, b.period // g) if b.period // g > 1 else 0
    t = (a.t0 + a.period * (diff * inv % (b.period // g))) % lcm
    start = max(a.t0, b.t0)
    while t < start:
        t += lcm
    return SolutionSet.progression(t, lcm)


def _verified(inst: SdlpInstance, sol: SolutionSet) -> SolutionSet:
    """Check the representative (and one period later) against the equation."""
    if sol.is_empty():
        return sol
    grp = inst.group
    want = grp.label(inst.h)
    if grp.label(rho_pow(inst.g, inst.sigma, sol.t0)) != want:
        raise InternalAssertionError("solution representative failed self-verification")
    if sol.kind == "progression":
        if grp.label(rho_pow(inst.g, inst.sigma, sol.t0 + sol.period)) != want:
            raise InternalAssertionError("solution period failed self-verification")
    return sol
