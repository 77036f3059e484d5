"""Exact integer, modular and Gaussian-integer arithmetic.

Everything here works on arbitrary-precision Python integers; there is no
floating point anywhere.  These are the primitives the field, curve and
descent layers are built on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Deterministic Miller-Rabin witness set: correct for all n < 3.3 * 10**24,
# far beyond anything this package touches.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test for the desk-scale range."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), extending the Jacobi and Legendre symbols.

    Raises ValueError for n = 0.
    """
    if n == 0:
        raise ValueError("kronecker symbol undefined for n = 0")
    k = 1
    if n < 0:
        n = -n
        if a < 0:
            k = -1
    # peel off the even part of n; (a|2) is 0 for even a, else depends on a mod 8
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        v = 0
        while n % 2 == 0:
            n //= 2
            v += 1
        if v % 2 and a % 8 in (3, 5):
            k = -k
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                k = -k
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a %= n
    return k if n == 1 else 0


def sum_of_two_squares(q: int) -> tuple[int, int]:
    """Write a prime q = 1 mod 4 as a**2 + b**2 with a odd, b even, both > 0.

    Exhaustive search up to sqrt(q); trivially auditable at desk scale.
    """
    if q % 4 != 1 or not is_prime(q):
        raise ValueError(f"{q} is not a prime congruent to 1 mod 4")
    a = 1
    while a * a < q:
        b2 = q - a * a
        if is_square(b2):
            return a, math.isqrt(b2)
        a += 2
    raise AssertionError("unreachable for prime q = 1 mod 4")


@dataclass(frozen=True)
class Factorization:
    sign: int
    factors: tuple[tuple[int, int], ...]  # (prime, exponent), primes increasing

    def reconstruct(self) -> int:
        n = self.sign
        for p, e in self.factors:
            n *= p**e
        return n

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0


def factor_small(n: int) -> Factorization:
    """Exact factorization by trial division; intended for |n| <= 10**12."""
    if n == 0:
        raise ValueError("cannot factor 0")
    sign = -1 if n < 0 else 1
    n = abs(n)
    factors = []
    for p in (2, 3, 5):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
    d = 7
    # wheel over residues coprime to 30
    steps = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            factors.append((d, e))
        d += steps[i]
        i = (i + 1) % 8
    if n > 1:
        factors.append((n, 1))
    factors.sort()
    return Factorization(sign, tuple(factors))


def squarefree_part(n: int) -> int:
    """Squarefree integer s with n = s * (square), preserving the sign."""
    if n == 0:
        raise ValueError("0 has no squarefree part")
    f = factor_small(n)
    s = f.sign
    for p, e in f.factors:
        if e % 2:
            s *= p
    return s


def valuation(n: int, p: int) -> int:
    """Exponent of the prime p in n; n must be nonzero."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class GaussianInteger:
    """Element re + im*i of Z[i]."""

    re: int
    im: int

    def __add__(self, other: "GaussianInteger") -> "GaussianInteger":
        return GaussianInteger(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianInteger") -> "GaussianInteger":
        return GaussianInteger(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussianInteger":
        return GaussianInteger(-self.re, -self.im)

    def __mul__(self, other: "GaussianInteger") -> "GaussianInteger":
        return GaussianInteger(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __pow__(self, n: int) -> "GaussianInteger":
        if n < 0:
            raise ValueError("negative powers are not Gaussian integers")
        r = GaussianInteger(1, 0)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def conj(self) -> "GaussianInteger":
        return GaussianInteger(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def divides(self, other: "GaussianInteger") -> bool:
        n = self.norm()
        if n == 0:
            return other.is_zero()
        prod = other * self.conj()
        return prod.re % n == 0 and prod.im % n == 0

    def exact_div(self, other: "GaussianInteger") -> "GaussianInteger":
        """self / other, raising if the quotient is not a Gaussian integer."""
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian integer")
        prod = self * other.conj()
        if prod.re % n or prod.im % n:
            raise ValueError(f"{other} does not divide {self}")
        return GaussianInteger(prod.re // n, prod.im // n)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i" if self.im not in (1, -1) else ("i" if self.im == 1 else "-i")
        im = f"+{self.im}i" if self.im > 0 else f"{self.im}i"
        im = im.replace("+1i", "+i").replace("-1i", "-i")
        return f"{self.re}{im}"


GI_ZERO = GaussianInteger(0, 0)
GI_ONE = GaussianInteger(1, 0)
GI_I = GaussianInteger(0, 1)

# The square lattice m*Z[i] has covering radius |m|/sqrt(2); after nearest
# rounding, the minimal-norm representative differs from the rounded one by
# m*d with |d| <= sqrt(2), so this 9-element neighbourhood is exhaustive.
_NEIGHBOURHOOD = tuple(
    GaussianInteger(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)
)


def _nearest_round(num: int, den: int) -> int:
    """Round num/den to the nearest integer (den > 0), ties toward +inf."""
    return (2 * num + den) // (2 * den)


def gaussian_divmod(x: GaussianInteger, m: GaussianInteger) -> tuple[GaussianInteger, GaussianInteger]:
    """Quotient/remainder with |r| <= |m|/sqrt(2) via nearest rounding."""
    if m.is_zero():
        raise ZeroDivisionError("gaussian division by zero")
    n = m.norm()
    prod = x * m.conj()
    q = GaussianInteger(_nearest_round(prod.re, n), _nearest_round(prod.im, n))
    return q, x - m * q


def gaussian_mod(x: GaussianInteger, m: GaussianInteger) -> GaussianInteger:
    """Canonical representative of x mod m: minimal norm, ties broken by
    lexicographically least (re, im)."""
    if m.is_zero():
        raise ZeroDivisionError("gaussian reduction modulo zero")
    _, r0 = gaussian_divmod(x, m)
    best = None
    for d in _NEIGHBOURHOOD:
        cand = r0 + m * d
        key = (cand.norm(), cand.re, cand.im)
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def gaussian_valuation(x: GaussianInteger, prime: GaussianInteger) -> int:
    """Exponent of a Gaussian prime in x (x nonzero)."""
    if x.is_zero():
        raise ValueError("valuation of 0")
    v = 0
    while prime.divides(x):
        x = x.exact_div(prime)
        v += 1
    return v
