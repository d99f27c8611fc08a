"""Classical oracles standing in for the quantum subroutines: discrete
logarithm, element/endomorphism order, orbit index+period, integer factors.

Every oracle self-verifies what it returns; a dlog answer is checked against
the defining equation before it leaves this module.
"""

import math
from dataclasses import dataclass

from . import integers
from .config import SolverConfig
from .errors import NotApplicableError, SdlpError
from .groups import Endo, GroupHandle, rho_apply, rho_pow


@dataclass(frozen=True)
class OrbitShape:
    """Tail length (index) and cycle length (period) of t -> rho^t(1_G)."""

    index: int
    period: int


def factor_integer(n: int, seed: int = 0) -> list:
    """Complete prime factorization of n < 2^64 as [(prime, exponent), ...]."""
    if n >= 1 << 64:
        raise SdlpError("factor_integer is limited to 64-bit inputs")
    return sorted(integers.factorize(n, seed=seed).items())


class UnitGroup(GroupHandle):
    """Multiplicative group of a finite field, as a labeled handle for the
    dlog oracle."""

    name = "units"

    def __init__(self, fld):
        self.fld = fld

    @property
    def identity(self):
        return self.fld.one

    def mul(self, x, y):
        return self.fld.mul(x, y)

    def inv(self, x):
        return self.fld.inv(x)

    def label(self, x):
        return self.fld.to_int(x)

    def generators(self):
        return []

    @property
    def codeword_bits(self):
        return max(1, (self.fld.size - 1).bit_length())

    def exponent_multiple(self):
        return integers.factor_prime_power_minus_one(self.fld.char, self.fld.degree)

    def __repr__(self):
        return f"Units({self.fld!r})"


# ---------------------------------------------------------------------------
# element and endomorphism orders


def element_order(group: GroupHandle, x, factored_multiple: dict | None = None):
    """(order, factored order) of a group element, via a factored multiple.

    Matrix elements get a multiple from the factor degrees of their minimal
    polynomial instead of the full GL exponent; that keeps the reduction
    cheap for large extension fields.
    """
    if factored_multiple is None:
        from .linalg import Matrix

        if isinstance(x, Matrix):
            factored_multiple = matrix_order_multiple(x)
        else:
            factored_multiple = group.exponent_multiple()
    mult = factored_multiple
    n = integers.factorization_product(mult)
    if not group.is_identity(group.pow(x, n)):
        raise SdlpError("claimed exponent multiple does not annihilate the element")
    order = 1
    fact: dict = {}
    for p, e in mult.items():
        y = group.pow(x, n // p**e)
        cnt = 0
        while not group.is_identity(y):
            y = group.pow(y, p)
            cnt += 1
        order *= p**cnt
        if cnt:
            fact[p] = cnt
    return order, dict(sorted(fact.items()))


def matrix_order_multiple(A) -> dict:
    """Factored multiple of ord(A): lcm(q^e - 1) over the factor degrees e
    of the minimal polynomial, times the p-part for repeated factors."""
    from .ff import factor_degrees
    from .linalg import min_poly

    F = A.field
    m = min_poly(A)
    p = F.char
    out: dict = {}
    for e in factor_degrees(m):
        out = integers.merge_lcm(out, integers.factor_prime_power_minus_one(p, F.degree * e))
    k = 0
    while p**k < max(1, m.degree()):
        k += 1
    if k:
        out = integers.merge_lcm(out, {p: k})
    return out


def _order_from_multiple(is_trivial_power, factored_multiple: dict):
    """Smallest n dividing the multiple with power n trivial."""
    n = integers.factorization_product(factored_multiple)
    fact = dict(factored_multiple)
    for p in list(fact):
        while fact.get(p, 0) > 0 and is_trivial_power(n // p):
            n //= p
            fact[p] -= 1
    return n, {p: e for p, e in sorted(fact.items()) if e > 0}


def endo_order(sigma: Endo, generators=None, seed: int = 0) -> list:
    """Factored order of an automorphism: the lcm over generators of the
    period of t -> sigma^t(x).

    Fast representation-specific multiples are reduced on the generators;
    table endomorphisms read the order off their cycle structure. The
    result is cached on the endo.
    """
    if not sigma.is_automorphism():
        raise SdlpError("endo_order expects an automorphism")
    gens = list(generators) if generators is not None else sigma.group.generators()
    mult = _endo_order_multiple(sigma, seed=seed)
    if mult is None:
        n, fact = _endo_order_by_walk(sigma, gens)
    else:
        grp = sigma.group

        def trivial(k):
            pw = sigma.pow(k)
            return all(grp.label(pw.apply(x)) == grp.label(x) for x in gens)

        if not trivial(integers.factorization_product(mult)):
            raise SdlpError("representation multiple does not annihilate the generators")
        n, fact = _order_from_multiple(trivial, mult)
    sigma.set_order(n, fact)
    return sorted(fact.items())


def _endo_order_multiple(sigma: Endo, seed: int = 0):
    """A factored multiple of ord(sigma) read off the representation."""
    from .groups import (
        ConjugationEndo,
        InducedPairEndo,
        LinearMapEndo,
        PowerMapEndo,
        ProductEndo,
        TableEndo,
    )

    if isinstance(sigma, PowerMapEndo):
        n = sigma.modulus
        lam: dict = {}
        for p, e in integers.factorize(n, seed=seed).items():
            if p == 2:
                part = {} if e == 1 else ({2: 1} if e == 2 else {2: e - 2})
            else:
                part = integers.merge_lcm({p: e - 1} if e > 1 else {}, integers.factorize(p - 1, seed=seed))
            lam = integers.merge_lcm(lam, part)
        return lam
    if isinstance(sigma, LinearMapEndo):
        from .groups import MatrixGroup

        if sigma.matrix.nrows == 0:
            return {}
        return MatrixGroup(sigma.matrix.field, sigma.matrix.nrows, []).exponent_multiple()
    if isinstance(sigma, ConjugationEndo):
        from .groups import MatrixGroup

        ambient = MatrixGroup(sigma.a.field, sigma.a.nrows, [])
        ord_a, fact_a = element_order(ambient, sigma.a)
        return fact_a
    if isinstance(sigma, TableEndo):
        return _table_order_factored(sigma)
    if isinstance(sigma, InducedPairEndo):
        inner_mult = _endo_order_multiple(sigma.inner, seed=seed)
        if inner_mult is not None:
            return inner_mult
        n, fact = _endo_order_by_walk(sigma.inner, sigma.inner.group.generators())
        return fact
    if isinstance(sigma, ProductEndo):
        out: dict = {}
        for comp in sigma.components:
            part = _endo_order_multiple(comp, seed=seed)
            if part is None:
                return None
            out = integers.merge_lcm(out, part)
        return out
    return None


def _table_order_factored(sigma) -> dict:
    """lcm of the cycle lengths of the label permutation."""
    grp = sigma.group
    succ = {lab: grp.label(y) for lab, y in sigma.mapping.items()}
    seen = set()
    out: dict = {}
    for start in succ:
        if start in seen:
            continue
        length = 0
        cur = start
        while cur not in seen:
            seen.add(cur)
            cur = succ[cur]
            length += 1
        if length:
            out = integers.merge_lcm(out, integers.factorize(length))
    return out


def _endo_order_by_walk(sigma: Endo, gens, cap: int = 1 << 20):
    """Per-generator period by plain iteration; lcm of the periods."""
    grp = sigma.group
    n = 1
    for x in gens:
        target = grp.label(x)
        cur = sigma.apply(x)
        period = 1
        while grp.label(cur) != target:
            cur = sigma.apply(cur)
            period += 1
            if period > cap:
                raise NotApplicableError("endomorphism order walk cap exceeded")
        n = n * period // math.gcd(n, period)
    return n, integers.factorize(n)


def ensure_endo_order(sigma: Endo, generators=None):
    if sigma.cached_order is None:
        endo_order(sigma, generators)
    return sigma.cached_order


# ---------------------------------------------------------------------------
# discrete logarithm


def dlog(
    group: GroupHandle,
    base,
    target,
    order_bound: int | None = None,
    factored_order: dict | None = None,
    config: SolverConfig | None = None,
):
    """Smallest t >= 0 with base^t = target, or None.

    With `factored_order` (a factored multiple of ord(base)) the search runs
    Pohlig-Hellman style on the exact order; otherwise baby-step giant-step
    over [0, order_bound). The returned value always satisfies the equation
    (self-verified); None means no solution in range.
    """
    config = config or SolverConfig()
    if group.label(target) == group.label(group.identity):
        return 0
    if factored_order is not None:
        n, fact = _order_from_multiple(lambda k: group.is_identity(group.pow(base, k)), factored_order)
        if config.oracle == "brute":
            t = _dlog_brute(group, base, target, n)
        elif config.oracle == "rho" and n > (1 << 10):
            t = _rho_with_order(group, base, target, n, config)
        else:
            t = _pohlig_hellman(group, base, target, n, fact, config)
    else:
        if order_bound is None:
            raise SdlpError("dlog needs an order bound or a factored order")
        method = config.oracle
        if method == "brute" or order_bound <= (1 << 10):
            t = _dlog_brute(group, base, target, order_bound)
        elif method == "rho":
            t = _dlog_rho(group, base, target, order_bound, config)
        else:
            t = _dlog_bsgs(group, base, target, order_bound, config)
    if t is None:
        return None
    if group.label(group.pow(base, t)) != group.label(target):
        return None
    return t


def _dlog_brute(group, base, target, bound):
    cur = group.identity
    want = group.label(target)
    for t in range(bound + 1):
        if group.label(cur) == want:
            return t
        cur = group.mul(cur, base)
    return None


def _dlog_bsgs(group, base, target, bound, config: SolverConfig):
    m = math.isqrt(max(bound, 1) - 1) + 1
    if m > config.bsgs_mem:
        raise NotApplicableError("instance too large for the BSGS table")
    table = {}
    cur = group.identity
    for j in range(m):
        table.setdefault(group.label(cur), j)
        cur = group.mul(cur, base)
    giant = group.inv(cur)  # base^{-m}
    gamma = target
    for i in range(m + 1):
        j = table.get(group.label(gamma))
        if j is not None:
            return i * m + j
        gamma = group.mul(gamma, giant)
    return None


def _dlog_rho(group, base, target, bound, config: SolverConfig):
    """Pollard rho with Floyd cycle-finding; needs the exact base order."""
    try:
        n, fact = element_order(group, base)
    except (NotImplementedError, SdlpError):
        return _dlog_bsgs(group, base, target, bound, config)
    if n <= 1 << 10:
        return _dlog_brute(group, base, target, n)
    return _rho_with_order(group, base, target, n, config)


def _rho_with_order(group, base, target, n, config: SolverConfig):
    import random

    rng = random.Random(config.seed)
    for _ in range(24):
        t = _rho_round(group, base, target, n, rng)
        if t is not None:
            return t
    return _dlog_bsgs(group, base, target, n, config)


def _rho_round(group, base, target, n, rng):
    def step(x, a, b):
        sel = hash(group.label(x)) % 3
        if sel == 0:
            return group.mul(x, base), (a + 1) % n, b
        if sel == 1:
            return group.mul(x, x), a * 2 % n, b * 2 % n
        return group.mul(x, target), a, (b + 1) % n

    a0 = rng.randrange(n)
    x = group.pow(base, a0)
    a, b = a0, 0
    X, A, B = x, a, b
    for _ in range(8 * math.isqrt(n) + 64):
        x, a, b = step(x, a, b)
        X, A, B = step(*step(X, A, B))
        if group.label(x) == group.label(X):
            r = (B - b) % n
            if r == 0:
                return None
            g = math.gcd(r, n)
            base_t = (a - A) % n
            if base_t % g != 0:
                return None
            # r*t = a-A (mod n); enumerate the g candidates
            n1 = n // g
            t0 = (base_t // g) * pow(r // g, -1, n1) % n1
            for k in range(g):
                t = (t0 + k * n1) % n
                if group.label(group.pow(base, t)) == group.label(target):
                    return _smallest_solution(group, base, target, t, n)
            return None
    return None


def _smallest_solution(group, base, target, t, n):
    # solutions form t + ord(base) Z; t was reduced mod n = ord(base)
    return t % n


def _pohlig_hellman(group, base, target, n, fact, config: SolverConfig):
    """dlog for exactly known factored order n of base."""
    residues = []
    for p, e in fact.items():
        pe = p**e
        gamma = group.pow(base, n // pe)
        h = group.pow(target, n // pe)
        gamma_p = group.pow(gamma, pe // p)
        t_pe = 0
        cur = h
        for k in range(e):
            c = group.pow(cur, pe // p ** (k + 1))
            d = _dlog_bsgs(group, gamma_p, c, p, config)
            if d is None:
                return None
            t_pe += d * p**k
            cur = group.mul(cur, group.inv(group.pow(gamma, d * p**k)))
        residues.append((t_pe, pe))
    t, mod = 0, 1
    for r, m in residues:
        t, mod = integers.crt_pair(t, mod, r, m)
    return t


# ---------------------------------------------------------------------------
# orbit shape


def orbit_index_period(g, sigma: Endo, config: SolverConfig | None = None) -> OrbitShape:
    """Exact (index, period) of the orbit rho^t(1_G).

    Automorphisms short-circuit: the orbit is a pure cycle whose length is
    recovered by reducing the factored multiple ord(sigma) * ord(rho^ord(1)).
    Endomorphisms fall back to Brent cycle detection on x -> g sigma(x).
    """
    config = config or SolverConfig()
    grp = sigma.group
    if sigma.is_automorphism():
        try:
            return OrbitShape(0, _automorphism_orbit_period(g, sigma))
        except (SdlpError, NotImplementedError):
            pass  # exponent data unavailable; fall through to the walk
    index, period = _brent_cycle(lambda x: rho_apply(g, sigma, x), grp.identity, grp.label, config.max_walk)
    return OrbitShape(index, period)


def _automorphism_orbit_period(g, sigma: Endo) -> int:
    grp = sigma.group
    ensure_endo_order(sigma)
    m = sigma.cached_order
    m_fact = sigma.cached_order_factored or integers.factorize(m)
    g_m = rho_pow(g, sigma, m)
    ord_gm, gm_fact = element_order(grp, g_m)
    mult: dict = dict(m_fact)
    for p, e in gm_fact.items():
        mult[p] = mult.get(p, 0) + e
    period, _ = _order_from_multiple(lambda k: grp.is_identity(rho_pow(g, sigma, k)), mult)
    return period


def _brent_cycle(f, x0, label, cap: int):
    power = period = 1
    tortoise = x0
    hare = f(x0)
    steps = 1
    while label(tortoise) != label(hare):
        if power == period:
            tortoise = hare
            power *= 2
            period = 0
        hare = f(hare)
        period += 1
        steps += 1
        if steps > cap:
            raise NotApplicableError("orbit walk cap exceeded")
    tortoise = hare = x0
    for _ in range(period):
        hare = f(hare)
    index = 0
    while label(tortoise) != label(hare):
        tortoise = f(tortoise)
        hare = f(hare)
        index += 1
        if index > cap:
            raise NotApplicableError("orbit walk cap exceeded")
    return index, period


def orbit_walk(g, sigma: Endo, cap: int):
    """Explicit orbit values [rho^0(1), ..., rho^{index+period-1}(1)].

    Returns (values, index, period); the listed values are pairwise
    label-distinct.
    """
    grp = sigma.group
    positions: dict = {}
    values = []
    x = grp.identity
    t = 0
    while True:
        lab = grp.label(x)
        if lab in positions:
            start = positions[lab]
            return values, start, t - start
        if t >= cap:
            raise NotApplicableError("orbit walk cap exceeded")
        positions[lab] = t
        values.append(x)
        x = rho_apply(g, sigma, x)
        t += 1
