"""Black-box group backends, effectively-evaluable endomorphisms, and the
semidirect exponentiation rho_(g,1)^t(1_G).

Group elements are native Python values owned by their handle (ints for
cyclic groups, tuples for vectors, Matrix objects for matrix groups, ...).
The handle supplies multiplication, inversion, the labeling function that
decides element equality, and a fixed-width byte code-word for the wire
format. Equality of elements must always go through labels; PairImage
backends deliberately use non-unique encodings.
"""

import random
from dataclasses import dataclass

from . import integers
from .errors import InternalAssertionError, SdlpError
from .linalg import Matrix, solve_linear


# ---------------------------------------------------------------------------
# group handles


class GroupHandle:
    """Common interface; concrete backends fill in the oracle methods."""

    name = "group"

    def mul(self, x, y):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def label(self, x):
        raise NotImplementedError

    @property
    def identity(self):
        raise NotImplementedError

    def generators(self) -> list:
        raise NotImplementedError

    def encode(self, x) -> bytes:
        raise NotImplementedError

    def decode(self, data: bytes):
        raise NotImplementedError

    @property
    def codeword_bits(self) -> int:
        """Bit length of code-words; always >= ceil(log2 |G|)."""
        raise NotImplementedError

    def exponent_multiple(self) -> dict:
        """Factored positive integer m with x^m = 1 for every element."""
        raise NotImplementedError

    def order(self):
        """|G| when cheaply known, else None."""
        return None

    def rand_element(self, rng: random.Random):
        word = self.identity
        gens = self.generators()
        if not gens:
            return word
        for _ in range(12):
            g = gens[rng.randrange(len(gens))]
            word = self.mul(word, g if rng.random() < 0.5 else self.inv(g))
        return word

    def eq(self, x, y) -> bool:
        return self.label(x) == self.label(y)

    def is_identity(self, x) -> bool:
        return self.label(x) == self.label(self.identity)

    def pow(self, x, n: int):
        if n < 0:
            return self.pow(self.inv(x), -n)
        out = self.identity
        acc = x
        while n:
            if n & 1:
                out = self.mul(out, acc)
            acc = self.mul(acc, acc)
            n >>= 1
        return out


class CyclicGroup(GroupHandle):
    """Z_n, written additively; elements are ints in [0, n)."""

    name = "cyclic"

    def __init__(self, n: int):
        if n < 1:
            raise SdlpError("cyclic group needs n >= 1")
        self.n = n
        self._width = max(1, ((n - 1).bit_length() + 7) // 8)

    @property
    def identity(self):
        return 0

    def mul(self, x, y):
        return (x + y) % self.n

    def inv(self, x):
        return -x % self.n

    def label(self, x):
        return x % self.n

    def generators(self):
        return [1 % self.n]

    def encode(self, x):
        return int(x % self.n).to_bytes(self._width, "little")

    def decode(self, data):
        return int.from_bytes(data, "little") % self.n

    @property
    def codeword_bits(self):
        return max(1, (self.n - 1).bit_length())

    def exponent_multiple(self):
        return integers.factorize(self.n)

    def order(self):
        return self.n

    def elements(self):
        return range(self.n)

    def rand_element(self, rng):
        return rng.randrange(self.n)

    def __repr__(self):
        return f"Cyclic({self.n})"


class VectorGroup(GroupHandle):
    """Z_p^d (elementary abelian), elements are tuples of ints mod p."""

    name = "vector"

    def __init__(self, p: int, d: int):
        if not integers.is_prime(p):
            raise SdlpError("vector group modulus must be prime")
        if d < 0:
            raise SdlpError("vector group needs d >= 0")
        self.p = p
        self.d = d
        self._width = max(1, ((p - 1).bit_length() + 7) // 8)

    @property
    def identity(self):
        return (0,) * self.d

    def mul(self, x, y):
        p = self.p
        return tuple((a + b) % p for a, b in zip(x, y))

    def inv(self, x):
        p = self.p
        return tuple(-a % p for a in x)

    def label(self, x):
        return tuple(a % self.p for a in x)

    def generators(self):
        return [tuple(1 if i == j else 0 for j in range(self.d)) for i in range(self.d)]

    def encode(self, x):
        return b"".join(int(a % self.p).to_bytes(self._width, "little") for a in x)

    def decode(self, data):
        w = self._width
        return tuple(int.from_bytes(data[i * w : (i + 1) * w], "little") % self.p for i in range(self.d))

    @property
    def codeword_bits(self):
        return max(1, self.d * max(1, (self.p - 1).bit_length()))

    def exponent_multiple(self):
        return {self.p: 1}

    def order(self):
        return self.p**self.d

    def elements(self):
        def rec(k):
            if k == 0:
                yield ()
                return
            for rest in rec(k - 1):
                for a in range(self.p):
                    yield rest + (a,)

        return rec(self.d)

    def rand_element(self, rng):
        return tuple(rng.randrange(self.p) for _ in range(self.d))

    def __repr__(self):
        return f"Vector({self.p},{self.d})"


class MatrixGroup(GroupHandle):
    """Subgroup of GL_d(F_q) given by generator matrices."""

    name = "matrix"

    def __init__(self, fld, d: int, generators):
        self.field = fld
        self.d = d
        self._gens = list(generators)
        for g in self._gens:
            if not isinstance(g, Matrix) or g.nrows != d or g.ncols != d:
                raise SdlpError("generators must be d x d matrices")
            if not g.is_invertible():
                raise SdlpError("generators must be invertible")
        self._width = max(1, ((fld.size - 1).bit_length() + 7) // 8)

    @property
    def identity(self):
        return Matrix.identity(self.field, self.d)

    def mul(self, x, y):
        return x * y

    def inv(self, x):
        return x.inverse()

    def label(self, x):
        return x.entries_key()

    def generators(self):
        return list(self._gens)

    def encode(self, x):
        return b"".join(int(v).to_bytes(self._width, "little") for v in x.entries_key())

    def decode(self, data):
        w = self._width
        vals = [int.from_bytes(data[i * w : (i + 1) * w], "little") for i in range(self.d * self.d)]
        F = self.field
        return Matrix.unflatten(F, [F.from_int(v) for v in vals], self.d, self.d)

    @property
    def codeword_bits(self):
        return max(1, self.d * self.d * max(1, (self.field.size - 1).bit_length()))

    def exponent_multiple(self):
        # exponent of GL_d(F_q) divides lcm(q^e - 1 : e <= d) * p^ceil(log_p d)
        p = self.field.char
        ext = self.field.degree
        out: dict = {}
        for e in range(1, self.d + 1):
            out = integers.merge_lcm(out, integers.factor_prime_power_minus_one(p, ext * e))
        k = 0
        while p**k < self.d:
            k += 1
        if k:
            out = integers.merge_lcm(out, {p: k})
        return out

    def __repr__(self):
        return f"MatrixGroup(q={self.field.size},d={self.d})"


class HeisenbergGroup(GroupHandle):
    """Upper unitriangular 3x3 matrices over F_p, stored as (a, b, c) for
    the entries (1,2), (2,3), (1,3)."""

    name = "heisenberg"

    def __init__(self, p: int):
        if not integers.is_prime(p):
            raise SdlpError("heisenberg group needs a prime p")
        self.p = p
        from .ff import PrimeField

        self.field = PrimeField(p)
        self._width = max(1, ((p - 1).bit_length() + 7) // 8)

    @property
    def identity(self):
        return (0, 0, 0)

    def mul(self, x, y):
        p = self.p
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p, (x[2] + y[2] + x[0] * y[1]) % p)

    def inv(self, x):
        p = self.p
        return (-x[0] % p, -x[1] % p, (x[0] * x[1] - x[2]) % p)

    def label(self, x):
        return x

    def generators(self):
        return [(1, 0, 0), (0, 1, 0)]

    def encode(self, x):
        return b"".join(int(a).to_bytes(self._width, "little") for a in x)

    def decode(self, data):
        w = self._width
        return tuple(int.from_bytes(data[i * w : (i + 1) * w], "little") % self.p for i in range(3))

    @property
    def codeword_bits(self):
        return max(1, 3 * max(1, (self.p - 1).bit_length()))

    def exponent_multiple(self):
        return {self.p: 1} if self.p != 2 else {2: 2}

    def order(self):
        return self.p**3

    def elements(self):
        for a in range(self.p):
            for b in range(self.p):
                for c in range(self.p):
                    yield (a, b, c)

    def rand_element(self, rng):
        return tuple(rng.randrange(self.p) for _ in range(3))

    def to_matrix(self, x) -> Matrix:
        a, b, c = x
        return Matrix(self.field, [[1, a, c], [0, 1, b], [0, 0, 1]])

    def from_matrix(self, M: Matrix):
        r = M.rows
        if (r[0][0], r[1][1], r[2][2]) != (1, 1, 1) or (r[1][0], r[2][0], r[2][1]) != (0, 0, 0):
            raise SdlpError("matrix is not upper unitriangular")
        return (r[0][1], r[1][2], r[0][2])

    def __repr__(self):
        return f"Heisenberg({self.p})"


class Hom:
    """A group homomorphism with an effectively evaluable forward map."""

    def __init__(self, source, target, func, kernel_generators=None, description="", is_identity=False):
        self.source = source
        self.target = target
        self._func = func
        self.kernel_generators = list(kernel_generators or [])
        self.description = description
        self.is_identity = is_identity

    def __call__(self, x):
        return self._func(x)

    def then_matrix(self, M: Matrix, new_target):
        """Compose a Vector-valued hom with a linear map on the left."""
        return Hom(
            self.source,
            new_target,
            lambda x: M.matvec(self(x)),
            kernel_generators=self.kernel_generators,
            description=self.description + " >> matrix",
        )

    def spot_check_hom(self, rng: random.Random, samples: int = 16):
        """Sampled check that psi(xy) = psi(x) psi(y)."""
        src, tgt = self.source, self.target
        for _ in range(samples):
            x = src.rand_element(rng)
            y = src.rand_element(rng)
            lhs = self(src.mul(x, y))
            rhs = tgt.mul(self(x), self(y))
            if tgt.label(lhs) != tgt.label(rhs):
                raise InternalAssertionError("map is not a homomorphism on samples")


def identity_hom(group) -> Hom:
    return Hom(group, group, lambda x: x, description="id", is_identity=True)


class PairImageGroup(GroupHandle):
    """Im(psi) encoded by pairs (x, psi(x)) with x in the source group.

    Multiplication happens on the x components; psi is re-evaluated for the
    second component; the label is the target label of psi(x). This is the
    non-unique-encoding trick that makes induced automorphisms evaluable.
    """

    name = "pair-image"

    def __init__(self, hom: Hom):
        self.hom = hom
        self.inner = hom.source
        self.target = hom.target

    @property
    def identity(self):
        e = self.inner.identity
        return (e, self.hom(e))

    def embed(self, x):
        return (x, self.hom(x))

    def mul(self, x, y):
        prod = self.inner.mul(x[0], y[0])
        return (prod, self.hom(prod))

    def inv(self, x):
        w = self.inner.inv(x[0])
        return (w, self.hom(w))

    def label(self, x):
        return self.target.label(x[1])

    def generators(self):
        return [self.embed(g) for g in self.inner.generators()]

    def encode(self, x):
        return self.inner.encode(x[0]) + self.target.encode(x[1])

    def decode(self, data):
        cut = len(self.inner.encode(self.inner.identity))
        inner = self.inner.decode(data[:cut])
        return (inner, self.hom(inner))

    @property
    def codeword_bits(self):
        return self.inner.codeword_bits + self.target.codeword_bits

    def exponent_multiple(self):
        # label orders divide element orders in the source group
        return self.inner.exponent_multiple()

    def rand_element(self, rng):
        return self.embed(self.inner.rand_element(rng))

    def __repr__(self):
        return f"PairImage({self.inner!r} -> {self.target!r})"


class ProductGroup(GroupHandle):
    """Direct product of two or more backends; elements are tuples."""

    name = "product"

    def __init__(self, factors):
        self.factors = list(factors)
        if len(self.factors) < 2:
            raise SdlpError("product needs at least two factors")

    @property
    def identity(self):
        return tuple(f.identity for f in self.factors)

    def mul(self, x, y):
        return tuple(f.mul(a, b) for f, a, b in zip(self.factors, x, y))

    def inv(self, x):
        return tuple(f.inv(a) for f, a in zip(self.factors, x))

    def label(self, x):
        return tuple(f.label(a) for f, a in zip(self.factors, x))

    def generators(self):
        gens = []
        for i, f in enumerate(self.factors):
            for g in f.generators():
                gens.append(self.embed(i, g))
        return gens

    def embed(self, i, g):
        return tuple(g if j == i else f.identity for j, f in enumerate(self.factors))

    def project_hom(self, i) -> Hom:
        kernel_gens = [
            self.embed(j, g) for j, f in enumerate(self.factors) if j != i for g in f.generators()
        ]
        return Hom(
            self,
            self.factors[i],
            lambda x, i=i: x[i],
            kernel_generators=kernel_gens,
            description=f"project[{i}]",
        )

    def encode(self, x):
        return b"".join(f.encode(a) for f, a in zip(self.factors, x))

    def decode(self, data):
        out = []
        for f in self.factors:
            cut = len(f.encode(f.identity))
            out.append(f.decode(data[:cut]))
            data = data[cut:]
        return tuple(out)

    @property
    def codeword_bits(self):
        return sum(f.codeword_bits for f in self.factors)

    def exponent_multiple(self):
        out: dict = {}
        for f in self.factors:
            out = integers.merge_lcm(out, f.exponent_multiple())
        return out

    def order(self):
        total = 1
        for f in self.factors:
            n = f.order()
            if n is None:
                return None
            total *= n
        return total

    def rand_element(self, rng):
        return tuple(f.rand_element(rng) for f in self.factors)

    def __repr__(self):
        return "Product(" + ", ".join(repr(f) for f in self.factors) + ")"


class Subgroup(GroupHandle):
    """A subgroup of a parent handle, given by generators; all element
    operations delegate to the parent."""

    name = "subgroup"

    def __init__(self, parent: GroupHandle, generators):
        self.parent = parent
        self._gens = list(generators)

    @property
    def identity(self):
        return self.parent.identity

    def mul(self, x, y):
        return self.parent.mul(x, y)

    def inv(self, x):
        return self.parent.inv(x)

    def label(self, x):
        return self.parent.label(x)

    def generators(self):
        return list(self._gens)

    def encode(self, x):
        return self.parent.encode(x)

    def decode(self, data):
        return self.parent.decode(data)

    @property
    def codeword_bits(self):
        return self.parent.codeword_bits

    def exponent_multiple(self):
        return self.parent.exponent_multiple()

    def __repr__(self):
        return f"Subgroup(of={self.parent!r}, ngens={len(self._gens)})"


def mulclose(group: GroupHandle, generators=None, cap: int = 1 << 14) -> list:
    """All elements generated by the given set (BFS closure), label-deduped."""
    gens = list(generators) if generators is not None else group.generators()
    seen = {group.label(group.identity): group.identity}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = group.mul(x, g)
                lab = group.label(y)
                if lab not in seen:
                    if len(seen) >= cap:
                        raise SdlpError("mulclose cap exceeded")
                    seen[lab] = y
                    nxt.append(y)
        frontier = nxt
    return list(seen.values())


# ---------------------------------------------------------------------------
# endomorphisms


class Endo:
    """An endomorphism of a group in an effectively-evaluable representation.

    `cached_order` is a positive integer n with sigma^n = identity (exact
    once oracles.endo_order has run; callers may install any multiple).
    """

    def __init__(self, group):
        self.group = group
        self.cached_order = None
        self.cached_order_factored = None

    def apply(self, x):
        raise NotImplementedError

    def pow(self, k: int) -> "Endo":
        raise NotImplementedError

    def compose(self, other: "Endo") -> "Endo":
        """self after other (apply other first)."""
        raise NotImplementedError

    def is_automorphism(self) -> bool:
        raise NotImplementedError

    def set_order(self, n: int, factored=None):
        self.cached_order = n
        self.cached_order_factored = factored

    def spot_check_morphism(self, rng: random.Random, samples: int = 16):
        g = self.group
        for _ in range(samples):
            x = g.rand_element(rng)
            y = g.rand_element(rng)
            if g.label(self.apply(g.mul(x, y))) != g.label(g.mul(self.apply(x), self.apply(y))):
                raise InternalAssertionError("endomorphism fails sigma(xy) = sigma(x)sigma(y)")
        if not g.is_identity(self.apply(g.identity)):
            raise InternalAssertionError("endomorphism moves the identity")


class PowerMapEndo(Endo):
    """x -> e*x on an additive abelian backend (Cyclic or Vector)."""

    def __init__(self, group, e: int):
        super().__init__(group)
        if isinstance(group, CyclicGroup):
            self.modulus = group.n
        elif isinstance(group, VectorGroup):
            self.modulus = group.p
        else:
            raise SdlpError("PowerMap needs a cyclic or vector group")
        self.e = e % self.modulus

    def apply(self, x):
        if isinstance(self.group, CyclicGroup):
            return x * self.e % self.modulus
        return tuple(a * self.e % self.modulus for a in x)

    def pow(self, k):
        return PowerMapEndo(self.group, pow(self.e, k, self.modulus))

    def compose(self, other):
        if not isinstance(other, PowerMapEndo) or other.group is not self.group:
            raise SdlpError("cannot compose endomorphisms of different kinds")
        return PowerMapEndo(self.group, self.e * other.e % self.modulus)

    def is_automorphism(self):
        import math

        return math.gcd(self.e, self.modulus) == 1

    def __repr__(self):
        return f"PowerMap({self.e})"


class LinearMapEndo(Endo):
    """x -> Mx on a vector group; M is a d x d matrix over F_p."""

    def __init__(self, group: VectorGroup, M: Matrix):
        super().__init__(group)
        if M.nrows != group.d or M.ncols != group.d:
            raise SdlpError("linear map has wrong shape")
        self.matrix = M

    def apply(self, x):
        return self.matrix.matvec(x)

    def pow(self, k):
        return LinearMapEndo(self.group, self.matrix**k)

    def compose(self, other):
        if not isinstance(other, LinearMapEndo) or other.group is not self.group:
            raise SdlpError("cannot compose endomorphisms of different kinds")
        return LinearMapEndo(self.group, self.matrix * other.matrix)

    def is_automorphism(self):
        return self.matrix.is_invertible()

    def __repr__(self):
        return f"LinearMap({self.matrix!r})"


class ConjugationEndo(Endo):
    """x -> a^-1 x a by a fixed invertible matrix (possibly outside G)."""

    def __init__(self, group, a: Matrix):
        super().__init__(group)
        if not a.is_invertible():
            raise SdlpError("conjugating matrix must be invertible")
        self.a = a
        self.a_inv = a.inverse()
        base = group
        while isinstance(base, Subgroup):
            base = base.parent
        if isinstance(base, HeisenbergGroup):
            self._to_mat = base.to_matrix
            self._from_mat = base.from_matrix
        elif isinstance(base, MatrixGroup):
            self._to_mat = None
        else:
            raise SdlpError("conjugation needs a matrix-backed group")

    def apply(self, x):
        if self._to_mat is None:
            return self.a_inv * x * self.a
        return self._from_mat(self.a_inv * self._to_mat(x) * self.a)

    def pow(self, k):
        return ConjugationEndo(self.group, self.a**k)

    def compose(self, other):
        if not isinstance(other, ConjugationEndo):
            raise SdlpError("cannot compose endomorphisms of different kinds")
        # (conj_a . conj_b)(x) = a^-1 b^-1 x b a = conj_{b a}(x)
        return ConjugationEndo(self.group, other.a * self.a)

    def is_automorphism(self):
        return True

    def __repr__(self):
        return f"Conjugation({self.a!r})"


class TableEndo(Endo):
    """Explicit permutation-style endomorphism: label -> image element."""

    MAX_SIZE = 1 << 12

    def __init__(self, group, mapping: dict, check=True):
        super().__init__(group)
        if len(mapping) > self.MAX_SIZE:
            raise SdlpError("table endomorphism too large")
        self.mapping = dict(mapping)
        if check:
            if group.label(group.identity) not in self.mapping:
                raise SdlpError("table does not cover the identity")

    @classmethod
    def from_callable(cls, group, func, check_hom=True, rng=None):
        mapping = {}
        for x in _enumerate_handle(group):
            mapping[group.label(x)] = func(x)
        endo = cls(group, mapping)
        if check_hom:
            endo.spot_check_morphism(rng or random.Random(0), samples=64)
        return endo

    def apply(self, x):
        try:
            return self.mapping[self.group.label(x)]
        except KeyError:
            raise SdlpError("element outside the table domain") from None

    def pow(self, k):
        out = {lab: self._elem(lab) for lab in self.mapping}  # identity map
        acc = self.mapping
        while k:
            if k & 1:
                out = self._compose_maps(acc, out)
            acc = self._compose_maps(acc, acc)
            k >>= 1
        return TableEndo(self.group, out, check=False)

    def _elem(self, lab):
        # invert the labeling inside the table's domain
        if not hasattr(self, "_by_label"):
            self._by_label = {}
            for x in _enumerate_handle(self.group):
                self._by_label.setdefault(self.group.label(x), x)
        return self._by_label[lab]

    def _compose_maps(self, outer, inner):
        g = self.group
        return {lab: outer[g.label(y)] for lab, y in inner.items()}

    def compose(self, other):
        if not isinstance(other, TableEndo):
            raise SdlpError("cannot compose endomorphisms of different kinds")
        return TableEndo(self.group, self._compose_maps(self.mapping, other.mapping), check=False)

    def is_automorphism(self):
        labels = {self.group.label(y) for y in self.mapping.values()}
        return len(labels) == len(self.mapping)

    def __repr__(self):
        return f"Table(|G|={len(self.mapping)})"


class InducedPairEndo(Endo):
    """The automorphism of a PairImage group induced by a source endo."""

    def __init__(self, group: PairImageGroup, inner: Endo):
        super().__init__(group)
        self.inner = inner

    def apply(self, x):
        y = self.inner.apply(x[0])
        return (y, self.group.hom(y))

    def pow(self, k):
        return InducedPairEndo(self.group, self.inner.pow(k))

    def compose(self, other):
        if not isinstance(other, InducedPairEndo):
            raise SdlpError("cannot compose endomorphisms of different kinds")
        return InducedPairEndo(self.group, self.inner.compose(other.inner))

    def is_automorphism(self):
        return self.inner.is_automorphism()

    def __repr__(self):
        return f"InducedOnPairImage({self.inner!r})"


class ProductEndo(Endo):
    """Componentwise endomorphism of a direct product."""

    def __init__(self, group: ProductGroup, components):
        super().__init__(group)
        self.components = list(components)
        if len(self.components) != len(group.factors):
            raise SdlpError("one component endo per product factor required")

    def apply(self, x):
        return tuple(e.apply(a) for e, a in zip(self.components, x))

    def pow(self, k):
        return ProductEndo(self.group, [e.pow(k) for e in self.components])

    def compose(self, other):
        if not isinstance(other, ProductEndo):
            raise SdlpError("cannot compose endomorphisms of different kinds")
        return ProductEndo(self.group, [a.compose(b) for a, b in zip(self.components, other.components)])

    def is_automorphism(self):
        return all(e.is_automorphism() for e in self.components)

    def __repr__(self):
        return "ProductEndo(" + ", ".join(repr(e) for e in self.components) + ")"


def restrict_endo(sigma: Endo, subgroup: Subgroup) -> Endo:
    """View sigma as an endomorphism of a subgroup it stabilizes."""
    if isinstance(sigma, ConjugationEndo):
        out = ConjugationEndo(subgroup, sigma.a)
    elif isinstance(sigma, (PowerMapEndo, LinearMapEndo, TableEndo, ProductEndo, InducedPairEndo)):
        out = sigma  # element-level action is unchanged
    else:
        out = sigma
    if out.cached_order is None and sigma.cached_order is not None:
        out.set_order(sigma.cached_order, sigma.cached_order_factored)
    return out


def _enumerate_handle(group):
    if hasattr(group, "elements"):
        return group.elements()
    return mulclose(group, cap=TableEndo.MAX_SIZE)


# ---------------------------------------------------------------------------
# instances and solution sets


@dataclass
class SdlpInstance:
    """One SDLP question: find all t >= 0 with h = prod sigma^i(g)."""

    group: GroupHandle
    sigma: Endo
    g: object
    h: object
    chain: object = None

    def __repr__(self):
        return f"SdlpInstance({self.group!r}, {self.sigma!r})"


@dataclass(frozen=True)
class SolutionSet:
    """Empty, {t0}, or the arithmetic progression {t0 + period*k : k >= 0}."""

    kind: str
    t0: int = 0
    period: int = 0

    @classmethod
    def empty(cls):
        return cls("empty")

    @classmethod
    def singleton(cls, t0: int):
        return cls("singleton", t0=t0)

    @classmethod
    def progression(cls, t0: int, period: int):
        if period <= 0:
            raise SdlpError("progression needs period > 0")
        return cls("progression", t0=t0, period=period)

    def is_empty(self):
        return self.kind == "empty"

    def smallest(self):
        if self.kind == "empty":
            raise SdlpError("empty solution set has no representative")
        return self.t0

    def contains(self, t: int) -> bool:
        if self.kind == "empty" or t < self.t0:
            return False
        if self.kind == "singleton":
            return t == self.t0
        return (t - self.t0) % self.period == 0

    def explicit_upto(self, bound: int) -> list:
        if self.kind == "empty":
            return []
        if self.kind == "singleton":
            return [self.t0] if self.t0 < bound else []
        return list(range(self.t0, bound, self.period))

    def map_affine(self, offset: int, scale: int) -> "SolutionSet":
        """Image under t -> offset + scale * t."""
        if self.kind == "empty":
            return self
        if self.kind == "singleton":
            return SolutionSet.singleton(offset + scale * self.t0)
        return SolutionSet.progression(offset + scale * self.t0, scale * self.period)

    def to_json(self) -> dict:
        if self.kind == "empty":
            return {"kind": "empty"}
        if self.kind == "singleton":
            return {"kind": "singleton", "t0": self.t0}
        return {"kind": "progression", "t0": self.t0, "period": self.period}

    def __repr__(self):
        if self.kind == "empty":
            return "SolutionSet(empty)"
        if self.kind == "singleton":
            return f"SolutionSet({{{self.t0}}})"
        return f"SolutionSet({{{self.t0} + {self.period}k}})"


# ---------------------------------------------------------------------------
# semidirect exponentiation


def sigma_pow_apply(sigma: Endo, i: int, x):
    """sigma^i(x) in O(log i) representation-power steps."""
    if i < 0:
        raise SdlpError("negative power; resolve through the cached order")
    if i == 0:
        return x
    if i == 1:
        return sigma.apply(x)
    return sigma.pow(i).apply(x)


def rho_pow(g, sigma: Endo, t: int):
    """rho_(g,1)^t(1_G) = prod_{i<t} sigma^i(g), by doubling.

    Uses rho^{m+n}(1) = rho^m(1) * sigma^m(rho^n(1)); O(log t) group
    multiplications and endo compositions.
    """
    if t < 0:
        raise SdlpError("rho_pow needs t >= 0")
    grp = sigma.group
    if t == 0:
        return grp.identity
    P = g
    E = sigma  # invariant: P = rho^m(1), E = sigma^m
    for bit in bin(t)[3:]:
        P = grp.mul(P, E.apply(P))
        E = E.compose(E)
        if bit == "1":
            P = grp.mul(P, E.apply(g))
            E = E.compose(sigma)
    return P


def rho_pow_naive(g, sigma: Endo, t: int):
    """Reference left-to-right product; linear in t."""
    grp = sigma.group
    out = grp.identity
    cur = g
    for _ in range(t):
        out = grp.mul(out, cur)
        cur = sigma.apply(cur)
    return out


def rho_apply(g, sigma: Endo, x):
    """One step of the representation: x -> g sigma(x)."""
    return sigma.group.mul(g, sigma.apply(x))


def rho_pow_inverse_apply(g, sigma: Endo, s: int, h):
    """rho_(g,1)^{-s}(h) for an automorphism with a cached order.

    Returns sigma^{-s}((rho^s(1))^{-1} h) where sigma^{-s} is resolved as
    sigma^{n - (s mod n)} through the cached order n.
    """
    if not sigma.is_automorphism():
        raise SdlpError("not an automorphism")
    n = sigma.cached_order
    if n is None:
        raise SdlpError("not an automorphism with known order; compute endo_order first")
    if s < 0:
        raise SdlpError("rho_pow_inverse_apply needs s >= 0")
    grp = sigma.group
    u = rho_pow(g, sigma, s)
    v = grp.mul(grp.inv(u), h)
    return sigma.pow((n - s % n) % n).apply(v)


# ---------------------------------------------------------------------------
# induced automorphisms on images


def induced_automorphism(psi: Hom, sigma: Endo, rng: random.Random | None = None):
    """(image handle, induced endo) for a hom with sigma-invariant kernel.

    When the target is a vector group and the generator images span it, the
    induced map is returned as an explicit linear map on the target (the
    direct method); otherwise the pair-encoding trick is used. Kernel
    invariance is spot-checked on any kernel generators the hom carries.
    """
    rng = rng or random.Random(0)
    _check_kernel_invariance(psi, sigma)
    if isinstance(psi.target, VectorGroup) and psi.target.d >= 0:
        direct = _induced_linear_map(psi, sigma)
        if direct is not None:
            return psi.target, direct
    pair_group = PairImageGroup(psi)
    return pair_group, InducedPairEndo(pair_group, sigma)


def _check_kernel_invariance(psi: Hom, sigma: Endo):
    tgt = psi.target
    for m in psi.kernel_generators:
        if not tgt.is_identity(psi(m)):
            raise InternalAssertionError("claimed kernel generator has nontrivial image")
        if not tgt.is_identity(psi(sigma.apply(m))):
            raise SdlpError("kernel not invariant")


def _induced_linear_map(psi: Hom, sigma: Endo):
    """Matrix of the induced map on a vector-group target, or None if the
    generator images do not span the target."""
    tgt: VectorGroup = psi.target
    F = _prime_field_of(tgt)
    gens = psi.source.generators()
    if not gens and tgt.d == 0:
        return LinearMapEndo(tgt, Matrix.zeros(F, 0, 0))
    vecs = [psi(x) for x in gens]
    imgs = [psi(sigma.apply(x)) for x in gens]
    V = Matrix(F, vecs)  # rows are psi(x_j)
    if V.rank() < tgt.d:
        return None
    rows = []
    for i in range(tgt.d):
        row = solve_linear(V, tuple(w[i] for w in imgs))
        if row is None:
            raise SdlpError("kernel not invariant")
        rows.append(row)
    return LinearMapEndo(tgt, Matrix(F, rows))


def _prime_field_of(tgt: VectorGroup):
    from .ff import PrimeField

    return PrimeField(tgt.p)
