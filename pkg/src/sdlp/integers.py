"""Integer number theory helpers: primality, factoring, factored arithmetic.

Factorizations are dicts {prime: exponent}. All routines are deterministic
given the seed they are passed (Pollard rho draws its parameters from a
seeded generator).
"""

import math
import random

_SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]

# Deterministic Miller-Rabin witness set, valid for all n < 3.3 * 10^24.
_MR_WITNESSES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for anything this toolkit handles)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    """One nontrivial factor of composite odd n (Brent's variant of rho)."""
    if n % 2 == 0:
        return 2
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int, seed: int = 0) -> dict:
    """Complete prime factorization of n >= 1 as {prime: exponent}."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    rng = random.Random(seed)
    factors: dict = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        # perfect powers make rho degenerate; peel them first
        root = _perfect_power_root(m)
        if root is not None:
            base, k = root
            stack.extend([base] * k)
            continue
        d = _pollard_brent(m, rng)
        stack.append(d)
        stack.append(m // d)
    return dict(sorted(factors.items()))


def _perfect_power_root(n):
    for k in range(2, n.bit_length() + 1):
        r = round(n ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand > 1 and cand**k == n:
                return cand, k
    return None


def factorization_product(factors: dict) -> int:
    out = 1
    for p, e in factors.items():
        out *= p**e
    return out


def merge_lcm(a: dict, b: dict) -> dict:
    """Factorization of lcm given two factorizations."""
    out = dict(a)
    for p, e in b.items():
        out[p] = max(out.get(p, 0), e)
    return dict(sorted(out.items()))


def divisors_ascending(factors: dict) -> list:
    """All divisors of the factored integer, in increasing order."""
    divs = [1]
    for p, e in factors.items():
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def crt_pair(r1: int, m1: int, r2: int, m2: int):
    """Solve x = r1 mod m1, x = r2 mod m2 for coprime moduli."""
    g, s, _ = _ext_gcd(m1, m2)
    if g != 1:
        raise ValueError("crt_pair expects coprime moduli")
    m = m1 * m2
    return (r1 + (r2 - r1) * s % m2 * m1) % m, m


def _ext_gcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _cyclotomic_value(m: int, x: int) -> int:
    """Phi_m(x) for integer x >= 2, via Phi_m(x) = prod (x^d - 1)^mu(m/d)."""
    num = 1
    den = 1
    for d in divisors_ascending(factorize(m)):
        mu = _moebius(m // d)
        if mu == 1:
            num *= x**d - 1
        elif mu == -1:
            den *= x**d - 1
    return num // den


def _moebius(n: int) -> int:
    out = 1
    for _, e in factorize(n).items():
        if e > 1:
            return 0
        out = -out
    return out


def factor_prime_power_minus_one(p: int, k: int, seed: int = 0) -> dict:
    """Factorization of p^k - 1, split into cyclotomic parts first.

    Each Phi_m(p) for m | k is at most p^phi(m), which keeps the pieces
    small enough for Pollard rho even when p^k - 1 itself is huge.
    """
    factors: dict = {}
    for m in divisors_ascending(factorize(k)):
        part = _cyclotomic_value(m, p)
        for q, e in factorize(part, seed=seed).items():
            factors[q] = factors.get(q, 0) + e
    return dict(sorted(factors.items()))
