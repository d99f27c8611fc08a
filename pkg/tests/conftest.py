"""Shared instance generators for the test suite.

Everything is seeded; matrix-group instances close their generator sets
under sigma so that sigma really is an endomorphism of the group.
"""

from sdlp.config import SolverConfig
from sdlp.ff import PrimeField, field_of_size
from sdlp.groups import (
    ConjugationEndo,
    CyclicGroup,
    HeisenbergGroup,
    LinearMapEndo,
    MatrixGroup,
    PowerMapEndo,
    SdlpInstance,
    VectorGroup,
    rho_pow,
)
from sdlp.linalg import Matrix
from sdlp.oracles import ensure_endo_order


def rand_invertible(fld, d, rng):
    while True:
        M = Matrix(fld, [[fld.rand(rng) for _ in range(d)] for _ in range(d)])
        if M.is_invertible():
            return M


def rand_upper_triangular(fld, d, rng):
    rows = [[fld.zero] * d for _ in range(d)]
    for i in range(d):
        rows[i][i] = fld.from_int(rng.randrange(1, fld.size)) if fld.size > 2 else fld.one
        while rows[i][i] == fld.zero:
            rows[i][i] = fld.rand(rng)
        for j in range(i + 1, d):
            rows[i][j] = fld.rand(rng)
    return Matrix(fld, rows)


def sigma_closed_matrix_group(fld, d, raw_gens, conj_matrix):
    """Matrix group whose generating set is closed under the conjugation."""
    probe = MatrixGroup(fld, d, raw_gens)
    sigma0 = ConjugationEndo(probe, conj_matrix)
    n = ensure_endo_order(sigma0)
    gens, seen = [], set()
    for g0 in raw_gens:
        cur = g0
        for _ in range(n):
            key = cur.entries_key()
            if key not in seen:
                seen.add(key)
                gens.append(cur)
            cur = sigma0.apply(cur)
    group = MatrixGroup(fld, d, gens)
    return group, ConjugationEndo(group, conj_matrix)


def random_cyclic_instance(rng, n_max=256, automorphism=False):
    import math

    n = rng.randrange(2, n_max)
    grp = CyclicGroup(n)
    while True:
        e = rng.randrange(n)
        if not automorphism or math.gcd(e, n) == 1:
            break
    sigma = PowerMapEndo(grp, e)
    return SdlpInstance(grp, sigma, grp.rand_element(rng), grp.rand_element(rng))


def random_vector_instance(rng, p_choices=(2, 3, 5, 7), d_max=4, automorphism=True):
    p = rng.choice(list(p_choices))
    d = rng.randrange(1, d_max + 1)
    grp = VectorGroup(p, d)
    fld = PrimeField(p)
    while True:
        M = Matrix(fld, [[rng.randrange(p) for _ in range(d)] for _ in range(d)])
        if not automorphism or M.is_invertible():
            break
    sigma = LinearMapEndo(grp, M)
    return SdlpInstance(grp, sigma, grp.rand_element(rng), grp.rand_element(rng))


def random_heisenberg_instance(rng, p_choices=(3, 5, 7, 11, 13)):
    p = rng.choice(list(p_choices))
    grp = HeisenbergGroup(p)
    T = rand_upper_triangular(grp.field, 3, rng)
    sigma = ConjugationEndo(grp, T)
    return SdlpInstance(grp, sigma, grp.rand_element(rng), grp.rand_element(rng))


def random_matrix_instance(rng, q_choices=(2, 3, 4, 5, 7, 8, 9), d_max=3):
    q = rng.choice(list(q_choices))
    fld = field_of_size(q)
    d = rng.randrange(1, d_max + 1)
    raw = [rand_invertible(fld, d, rng) for _ in range(rng.randrange(1, 3))]
    while True:
        cm = rand_invertible(fld, d, rng)
        probe = ConjugationEndo(MatrixGroup(fld, d, raw), cm)
        if ensure_endo_order(probe) <= 64:  # keep the closed generating set small
            break
    grp, sigma = sigma_closed_matrix_group(fld, d, raw, cm)
    return SdlpInstance(grp, sigma, grp.rand_element(rng), grp.rand_element(rng))


def primitive_element(fld, rng):
    """A generator of the multiplicative group of a finite field."""
    from sdlp.oracles import UnitGroup, element_order

    units = UnitGroup(fld)
    while True:
        a = fld.rand_nonzero(rng)
        n, _ = element_order(units, a)
        if n == fld.size - 1:
            return a


def borel_group(fld, d, rng):
    """The full upper-triangular invertible group, with a small fixed
    generating set; conjugation by any upper-triangular matrix maps it to
    itself, so no sigma-closure is needed."""
    lam = primitive_element(fld, rng)
    gens = []
    for i in range(d):
        rows = [[fld.one if a == b else fld.zero for b in range(d)] for a in range(d)]
        rows[i][i] = lam
        gens.append(Matrix(fld, rows))
    for i in range(d - 1):
        rows = [[fld.one if a == b else fld.zero for b in range(d)] for a in range(d)]
        rows[i][i + 1] = fld.one
        gens.append(Matrix(fld, rows))
    return MatrixGroup(fld, d, gens)


def with_forward_h(inst, rng, t_max=4096):
    """Replace h by rho^{t*}(1) for a random t*; returns (instance, t*)."""
    t_star = rng.randrange(t_max)
    h = rho_pow(inst.g, inst.sigma, t_star)
    return SdlpInstance(inst.group, inst.sigma, inst.g, h, chain=inst.chain), t_star


def small_config():
    return SolverConfig(max_walk=1 << 16)
