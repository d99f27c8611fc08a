"""Exact arithmetic over prime fields F_p and extensions F_{p^e}.

Prime field elements are plain ints in [0, p); extension field elements are
tuples of ints of length e (coefficients in the polynomial basis, constant
term first). Polynomials are Poly objects over either field, normalized so
the coefficient list never has trailing zeros.
"""

from __future__ import annotations

import random

from .errors import SdlpError
from .integers import is_prime


class PrimeField:
    """The field Z/pZ for a 64-bit prime p."""

    def __init__(self, p: int):
        if p >= 1 << 64:
            raise SdlpError("prime modulus out of 64-bit range")
        if not is_prime(p):
            raise SdlpError(f"{p} is not prime")
        self.p = p
        self.char = p
        self.degree = 1
        self.size = p
        self.zero = 0
        self.one = 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def pow(self, a, n):
        return pow(a, n, self.p)

    def from_int(self, n: int):
        return n % self.p

    def to_int(self, a) -> int:
        return a

    def rand(self, rng: random.Random):
        return rng.randrange(self.p)

    def rand_nonzero(self, rng: random.Random):
        return rng.randrange(1, self.p)

    def elements(self):
        return range(self.p)

    def to_prime_coeffs(self, a):
        return (a,)

    def from_prime_coeffs(self, coeffs):
        return coeffs[0] % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"F_{self.p}"


class ExtField:
    """F_{p^e} = F_p[x] / (modulus), elements as coefficient tuples."""

    def __init__(self, base: PrimeField, modulus):
        mod = Poly(base, list(modulus.coeffs) if isinstance(modulus, Poly) else list(modulus))
        if mod.degree() < 1 or mod.lead() != base.one:
            raise SdlpError("modulus must be monic of degree >= 1")
        if mod.degree() >= 2 and not is_irreducible(mod):
            raise SdlpError("modulus polynomial is reducible")
        self.base = base
        self.modulus = mod
        self.p = base.p
        self.char = base.p
        self.degree = mod.degree()
        self.size = base.p**self.degree
        if self.size >= 1 << 128:
            raise SdlpError("extension field size out of range")
        self.zero = (0,) * self.degree
        self.one = tuple([1] + [0] * (self.degree - 1))

    def gen(self):
        """The class of x (a root of the modulus)."""
        return self.from_coeffs([0, 1])

    def from_coeffs(self, coeffs):
        c = [x % self.p for x in coeffs]
        if len(c) > self.degree:
            c = Poly(self.base, c).mod(self.modulus).coeffs
            c = list(c)
        return tuple(c + [0] * (self.degree - len(c)))

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple(-x % p for x in a)

    def mul(self, a, b):
        raw = [0] * (2 * self.degree - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    raw[i + j] += x * y
        return self._reduce(raw)

    def _reduce(self, raw):
        p = self.p
        mod = self.modulus.coeffs
        e = self.degree
        raw = [x % p for x in raw]
        for i in range(len(raw) - 1, e - 1, -1):
            c = raw[i]
            if c:
                raw[i] = 0
                for j in range(e):
                    raw[i - e + j] = (raw[i - e + j] - c * mod[j]) % p
        return tuple(raw[:e])

    def inv(self, a):
        if all(x == 0 for x in a):
            raise ZeroDivisionError("inverse of zero")
        g, s = _poly_half_ext_gcd(Poly(self.base, list(a)), self.modulus)
        if g.degree() != 0:
            raise ZeroDivisionError("element not invertible (reducible modulus?)")
        s = s.scale(self.base.inv(g.coeffs[0]))
        return self.from_coeffs(s.coeffs)

    def pow(self, a, n):
        if n < 0:
            return self.pow(self.inv(a), -n)
        out = self.one
        acc = a
        while n:
            if n & 1:
                out = self.mul(out, acc)
            acc = self.mul(acc, acc)
            n >>= 1
        return out

    def from_int(self, n: int):
        digits = []
        for _ in range(self.degree):
            n, r = divmod(n, self.p)
            digits.append(r)
        return tuple(digits)

    def to_int(self, a) -> int:
        out = 0
        for c in reversed(a):
            out = out * self.p + c
        return out

    def rand(self, rng: random.Random):
        return tuple(rng.randrange(self.p) for _ in range(self.degree))

    def rand_nonzero(self, rng: random.Random):
        while True:
            a = self.rand(rng)
            if any(a):
                return a

    def elements(self):
        return (self.from_int(n) for n in range(self.size))

    def to_prime_coeffs(self, a):
        return tuple(a)

    def from_prime_coeffs(self, coeffs):
        return tuple(c % self.p for c in coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, ExtField)
            and other.p == self.p
            and other.modulus.coeffs == self.modulus.coeffs
        )

    def __hash__(self):
        return hash(("ExtField", self.p, self.modulus.coeffs))

    def __repr__(self):
        return f"F_{self.p}^{self.degree}"


class BinaryField:
    """F_{2^k} with elements as int bitmasks (bit i = coefficient of x^i).

    Same interface as ExtField but with carryless multiplication, which is
    what makes desk-scale q = 2^16 matrix work tolerable.
    """

    def __init__(self, k: int, modulus_int: int | None = None):
        if k < 1 or k >= 128:
            raise SdlpError("binary field size out of range")
        base = PrimeField(2)
        if modulus_int is None:
            modulus_int = _poly_to_bits(canonical_irreducible(base, k))
        if modulus_int.bit_length() != k + 1:
            raise SdlpError("modulus must have degree k")
        mod_poly = Poly(base, [(modulus_int >> i) & 1 for i in range(k + 1)])
        if k >= 2 and not is_irreducible(mod_poly):
            raise SdlpError("modulus polynomial is reducible")
        self.base = base
        self.modulus = mod_poly
        self.modulus_int = modulus_int
        self.p = 2
        self.char = 2
        self.degree = k
        self.size = 1 << k
        self.zero = 0
        self.one = 1

    def gen(self):
        return 2 % self.size

    def add(self, a, b):
        return a ^ b

    sub = add

    def neg(self, a):
        return a

    def mul(self, a, b):
        mod = self.modulus_int
        top = 1 << self.degree
        r = 0
        while a:
            if a & 1:
                r ^= b
            a >>= 1
            b <<= 1
            if b & top:
                b ^= mod
        return r

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        r0, r1 = self.modulus_int, a
        s0, s1 = 0, 1
        while r1:
            shift = r0.bit_length() - r1.bit_length()
            if shift < 0:
                r0, r1, s0, s1 = r1, r0, s1, s0
                continue
            r0 ^= r1 << shift
            s0 ^= s1 << shift
        # r0 holds gcd = 1 for an irreducible modulus; s0 may exceed degree
        if r0 != 1:
            raise ZeroDivisionError("element not invertible")
        return self._mod_bits(s0)

    def _mod_bits(self, v: int) -> int:
        mod = self.modulus_int
        k = self.degree
        while v.bit_length() > k:
            v ^= mod << (v.bit_length() - (k + 1))
        return v

    def pow(self, a, n):
        if n < 0:
            return self.pow(self.inv(a), -n)
        out = 1
        acc = a
        while n:
            if n & 1:
                out = self.mul(out, acc)
            acc = self.mul(acc, acc)
            n >>= 1
        return out

    def from_int(self, n: int):
        return n % self.size

    def to_int(self, a) -> int:
        return a

    def from_coeffs(self, coeffs):
        v = 0
        for i, c in enumerate(coeffs):
            if c % 2:
                v ^= 1 << i
        return self._mod_bits(v)

    def rand(self, rng: random.Random):
        return rng.randrange(self.size)

    def rand_nonzero(self, rng: random.Random):
        return rng.randrange(1, self.size)

    def elements(self):
        return range(self.size)

    def to_prime_coeffs(self, a):
        return tuple((a >> i) & 1 for i in range(self.degree))

    def from_prime_coeffs(self, coeffs):
        v = 0
        for i, c in enumerate(coeffs):
            if c % 2:
                v |= 1 << i
        return v

    def __eq__(self, other):
        return isinstance(other, BinaryField) and other.modulus_int == self.modulus_int

    def __hash__(self):
        return hash(("BinaryField", self.modulus_int))

    def __repr__(self):
        return f"F_2^{self.degree}"


def _poly_to_bits(f: Poly) -> int:
    v = 0
    for i, c in enumerate(f.coeffs):
        if c % 2:
            v |= 1 << i
    return v


def field_of_size(q: int) -> "PrimeField | ExtField | BinaryField":
    """F_q for a prime power q, with the canonical (lexicographically
    smallest irreducible) modulus when q is a proper power."""
    from .integers import factorize

    fac = factorize(q)
    if len(fac) != 1:
        raise SdlpError(f"{q} is not a prime power")
    (p, e), = fac.items()
    if e == 1:
        return PrimeField(p)
    if p == 2:
        return BinaryField(e)
    return ExtField(PrimeField(p), canonical_irreducible(PrimeField(p), e))


def canonical_irreducible(base: PrimeField, e: int) -> "Poly":
    """First monic irreducible of degree e over F_p in lex coefficient order."""
    for n in range(base.p**e):
        coeffs = []
        m = n
        for _ in range(e):
            m, r = divmod(m, base.p)
            coeffs.append(r)
        f = Poly(base, coeffs + [1])
        if is_irreducible(f):
            return f
    raise SdlpError("no irreducible polynomial found")  # unreachable


class Poly:
    """Dense univariate polynomial over a field, constant term first."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        while coeffs and coeffs[-1] == field.zero:
            coeffs = coeffs[:-1]
        self.field = field
        self.coeffs = tuple(coeffs)

    @classmethod
    def x(cls, field):
        return cls(field, [field.zero, field.one])

    @classmethod
    def constant(cls, field, c):
        return cls(field, [c])

    def degree(self) -> int:
        return len(self.coeffs) - 1  # zero polynomial has degree -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self):
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == self.field.one

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and other.field == self.field
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __add__(self, other):
        F = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return Poly(F, out)

    def __sub__(self, other):
        F = self.field
        out = list(self.coeffs) + [F.zero] * max(0, len(other.coeffs) - len(self.coeffs))
        for i, c in enumerate(other.coeffs):
            out[i] = F.sub(out[i], c)
        return Poly(F, out)

    def __mul__(self, other):
        F = self.field
        if self.is_zero() or other.is_zero():
            return Poly(F, [])
        out = [F.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == F.zero:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = F.add(out[i + j], F.mul(a, b))
        return Poly(F, out)

    def scale(self, c):
        F = self.field
        return Poly(F, [F.mul(c, a) for a in self.coeffs])

    def monic(self):
        if self.is_zero() or self.is_monic():
            return self
        return self.scale(self.field.inv(self.lead()))

    def divmod(self, other):
        F = self.field
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree()
        inv_lead = F.inv(other.lead())
        quot = [F.zero] * max(0, len(rem) - db)
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i]
            if c == F.zero:
                continue
            q = F.mul(c, inv_lead)
            quot[i - db] = q
            for j, b in enumerate(other.coeffs):
                rem[i - db + j] = F.sub(rem[i - db + j], F.mul(q, b))
        return Poly(F, quot), Poly(F, rem)

    def mod(self, other):
        return self.divmod(other)[1]

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.mod(b)
        return a.monic() if not a.is_zero() else a

    def pow_mod(self, n: int, modulus: "Poly"):
        out = Poly(self.field, [self.field.one])
        acc = self.mod(modulus)
        while n:
            if n & 1:
                out = (out * acc).mod(modulus)
            acc = (acc * acc).mod(modulus)
            n >>= 1
        return out

    def derivative(self):
        F = self.field
        out = []
        for i, c in enumerate(self.coeffs[1:], start=1):
            k = i % F.char
            out.append(F.mul(F.from_int(k), c))
        return Poly(F, out)

    def eval(self, x):
        F = self.field
        out = F.zero
        for c in reversed(self.coeffs):
            out = F.add(F.mul(out, x), c)
        return out

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == self.field.zero:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                terms.append(f"{c}*x^{i}" if c != self.field.one else f"x^{i}")
        return "Poly(" + " + ".join(terms) + ")"


def _poly_half_ext_gcd(a: Poly, b: Poly):
    """Return (g, s) with g = gcd(a, b) and s*a = g mod b."""
    F = a.field
    old_r, r = a, b
    old_s, s = Poly(F, [F.one]), Poly(F, [])
    while not r.is_zero():
        q, rem = old_r.divmod(r)
        old_r, r = r, rem
        old_s, s = s, old_s - q * s
    return old_r, old_s


def is_irreducible(f: Poly) -> bool:
    """Rabin test: x^(q^d) = x mod f and gcd conditions at maximal divisors."""
    d = f.degree()
    if d < 1:
        return False
    if d == 1:
        return True
    F = f.field
    q = F.size
    x = Poly.x(F)
    from .integers import factorize

    for ell in factorize(d):
        h = x.pow_mod(q ** (d // ell), f) - x
        if not h.gcd(f).degree() == 0:
            return False
    return x.pow_mod(q**d, f).mod(f) == x.mod(f)


def factor_poly(f: Poly, seed: int = 0) -> list:
    """Factor a monic polynomial over a prime field.

    Returns [(irreducible Poly, multiplicity), ...] sorted by (degree,
    coefficients). Cantor-Zassenhaus equal-degree splitting drives the
    randomized part; the seed makes it reproducible.
    """
    if not isinstance(f.field, PrimeField):
        raise SdlpError("factor_poly operates over prime fields")
    if f.is_zero() or f.degree() < 1:
        raise SdlpError("factor_poly expects degree >= 1")
    if not f.is_monic():
        raise SdlpError("factor_poly expects a monic polynomial")
    rng = random.Random(seed)
    out = _factor_monic(f.monic(), rng)
    factors = [(Poly(f.field, list(c)), m) for c, m in out.items()]
    factors.sort(key=lambda fm: (fm[0].degree(), fm[0].coeffs))
    return factors


def _factor_monic(f: Poly, rng: random.Random) -> dict:
    """{coeff tuple: multiplicity} for monic f, recursing on p-th powers."""
    F = f.field
    p = F.char
    if f.degree() < 1:
        return {}
    d = f.derivative()
    if d.is_zero():
        # f = u(x)^p: take the p-th root coefficientwise (Frobenius fixes F_p)
        root = Poly(F, [f.coeffs[i] for i in range(0, len(f.coeffs), p)])
        return {c: p * m for c, m in _factor_monic(root, rng).items()}
    out: dict = {}
    squarefree = f.divmod(f.gcd(d))[0].monic()
    for h in _factor_squarefree(squarefree, rng):
        mult = 0
        while True:
            q, r = f.divmod(h)
            if not r.is_zero():
                break
            f = q
            mult += 1
        out[h.coeffs] = mult
    # leftover is a perfect p-th power (all remaining multiplicities divide p)
    if f.degree() > 0:
        for c, m in _factor_monic(f.monic(), rng).items():
            out[c] = out.get(c, 0) + m
    return out


def _factor_squarefree(f: Poly, rng: random.Random):
    """Irreducible factors of a squarefree monic polynomial."""
    F = f.field
    q = F.size
    x = Poly.x(F)
    out = []
    # distinct-degree decomposition
    h = x
    rest = f
    d = 0
    while rest.degree() > 2 * (d + 1) - 1 and rest.degree() > 0:
        d += 1
        h = h.pow_mod(q, rest)
        g = (h - x).gcd(rest)
        if g.degree() > 0:
            out.extend(_equal_degree_split(g, d, rng))
            rest = rest.divmod(g)[0]
            h = h.mod(rest)
    if rest.degree() > 0:
        out.append(rest.monic())
    return out


def _equal_degree_split(f: Poly, d: int, rng: random.Random):
    """Split a product of distinct irreducibles, all of degree d."""
    F = f.field
    n = f.degree()
    if n == d:
        return [f.monic()]
    q = F.size
    while True:
        a = Poly(F, [F.rand(rng) for _ in range(n)])
        if a.degree() < 1:
            continue
        g = a.gcd(f)
        if 0 < g.degree() < n:
            break
        if q % 2 == 1:
            b = a.pow_mod((q**d - 1) // 2, f) - Poly(F, [F.one])
        else:
            # char 2: use the trace map sum a^(2^i)
            b = Poly(F, [])
            t = a.mod(f)
            for _ in range(d * _log2_exact(q)):
                b = (b + t).mod(f)
                t = (t * t).mod(f)
        g = b.gcd(f)
        if 0 < g.degree() < n:
            break
    left = _equal_degree_split(g.monic(), d, rng)
    right = _equal_degree_split(f.divmod(g)[0].monic(), d, rng)
    return left + right


def _log2_exact(q: int) -> int:
    k = q.bit_length() - 1
    if 1 << k != q:
        raise SdlpError("char-2 splitting expects q a power of two")
    return k


def factor_degrees(f: Poly) -> list:
    """Distinct degrees of the irreducible factors of f, over any finite
    coefficient field.

    Uses gcd(x^{q^e} - x, f) ascending in e; x^{q^e} - x is squarefree, so
    repeated factors do not disturb the degree extraction. No splitting is
    performed, which keeps this usable over extension fields.
    """
    F = f.field
    q = F.size
    rest = f.monic()
    degrees = []
    x = Poly.x(F)
    h = x
    e = 0
    while rest.degree() > 0:
        e += 1
        if 2 * e > rest.degree():
            degrees.append(rest.degree())
            break
        h = h.pow_mod(q, rest)
        g = (h - x).gcd(rest)
        if g.degree() > 0:
            degrees.append(e)
            while True:
                g = g.gcd(rest)
                if g.degree() == 0:
                    break
                rest = rest.divmod(g)[0]
            h = h.mod(rest)
    return degrees
