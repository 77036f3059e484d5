"""Finite fields F_{p^k}, polynomial factorization mod p, and small number
fields with prime splitting, residue maps and valuations.

Number fields are represented by a monic integral defining polynomial;
prime splitting uses the factor-mod-p rule, guarded by the Dedekind
criterion so that a prime dividing the index obstruction is rejected with
an explicit error instead of producing a wrong answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .arith import is_prime, is_square, kronecker, valuation


class UnsupportedPrimeError(ValueError):
    """Prime splitting at this prime would require the maximal order."""


class NonIntegralError(ValueError):
    """Element has a pole at the prime being reduced at."""

    def __init__(self, message, val=None):
        super().__init__(message)
        self.valuation = val


# ---------------------------------------------------------------------------
# dense polynomials over F_p, coefficients low-to-high, always trimmed
# ---------------------------------------------------------------------------

def _ptrim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return tuple(f)


def pmod(f, p):
    return _ptrim([c % p for c in f])


def padd(f, g, p):
    n = max(len(f), len(g))
    return _ptrim([((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)) % p for i in range(n)])


def psub(f, g, p):
    n = max(len(f), len(g))
    return _ptrim([((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p for i in range(n)])


def pmul(f, g, p):
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _ptrim(out)


def pdivmod(f, g, p):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    q = [0] * max(0, len(f) - len(g) + 1)
    inv = pow(g[-1], -1, p)
    while len(f) >= len(g) and _ptrim(f):
        if f[-1] == 0:
            f.pop()
            continue
        d = len(f) - len(g)
        c = f[-1] * inv % p
        q[d] = c
        for i, b in enumerate(g):
            f[d + i] = (f[d + i] - c * b) % p
        f.pop()
    return _ptrim(q), _ptrim(f)


def pgcd(f, g, p):
    while g:
        f, g = g, pdivmod(f, g, p)[1]
    if f:
        inv = pow(f[-1], -1, p)
        f = _ptrim([c * inv % p for c in f])
    return f


def ppowmod(f, n, mod, p):
    r = (1,)
    f = pdivmod(f, mod, p)[1]
    while n:
        if n & 1:
            r = pdivmod(pmul(r, f, p), mod, p)[1]
        f = pdivmod(pmul(f, f, p), mod, p)[1]
        n >>= 1
    return r


def pderiv(f, p):
    return _ptrim([(i * c) % p for i, c in enumerate(f)][1:])


def peval(f, x, p):
    r = 0
    for c in reversed(f):
        r = (r * x + c) % p
    return r


def _pmonic(f, p):
    inv = pow(f[-1], -1, p)
    return _ptrim([c * inv % p for c in f])


def _equal_degree_split(f, d, p):
    """Split a product of distinct irreducibles of degree d (deterministic
    trial sequence, so the factor set is reproducible)."""
    n = (len(f) - 1)
    if n == d:
        return [f]
    # enumerate trial polynomials in a fixed order
    trial_index = 1
    while True:
        trial_index += 1
        # encode trial_index in base p as a polynomial of degree < n
        a, idx = [], trial_index
        while idx:
            a.append(idx % p)
            idx //= p
        a = _ptrim(a[:n])
        if len(a) <= 1:
            continue
        if p == 2:
            # trace map a + a^2 + ... + a^(2^(d-1))
            t, cur = (), a
            for _ in range(d):
                t = padd(t, cur, p)
                cur = pdivmod(pmul(cur, cur, p), f, p)[1]
            g = pgcd(t, f, p)
        else:
            b = ppowmod(a, (p**d - 1) // 2, f, p)
            g = pgcd(psub(b, (1,), p), f, p)
        if 0 < len(g) - 1 < n:
            h = pdivmod(f, g, p)[0]
            return _equal_degree_split(_pmonic(g, p), d, p) + _equal_degree_split(_pmonic(h, p), d, p)


def poly_factor_mod(f, p):
    """Factor f over F_p into monic irreducibles.

    Returns a list of (factor, multiplicity) sorted by (degree, coefficients);
    multiplying everything back together recovers f up to the leading unit.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    f = pmod(f, p)
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    if len(f) == 1:
        return []
    factors: dict[tuple, int] = {}

    def _accumulate(g, mult):
        g = _pmonic(g, p)
        if len(g) == 1:
            return
        # squarefree decomposition via gcd with the derivative
        while len(g) > 1:
            dg = pderiv(g, p)
            if not dg:
                # g = h(x^p) = h(x)^p in F_p[x]
                h = _ptrim([g[i] for i in range(0, len(g), p)])
                _accumulate(h, mult * p)
                return
            sqf = pdivmod(g, pgcd(g, dg, p))[0] if False else pdivmod(g, pgcd(g, dg, p), p)[0]
            _distinct_degree(sqf, mult)
            g = pdivmod(g, sqf, p)[0]

    def _distinct_degree(g, mult):
        # g squarefree; split by degree then by equal-degree factorization
        d = 1
        x = (0, 1)
        while len(g) - 1 >= 2 * d:
            xq = ppowmod(x, p**d, g, p)
            gd = pgcd(psub(xq, x, p), g, p)
            if len(gd) > 1:
                for irr in _equal_degree_split(gd, d, p):
                    factors[irr] = factors.get(irr, 0) + mult
                g = pdivmod(g, gd, p)[0]
            d += 1
        if len(g) > 1:
            factors[g] = factors.get(g, 0) + mult

    _accumulate(f, 1)
    return sorted(factors.items(), key=lambda t: (len(t[0]), t[0]))


def poly_roots_mod(f, p):
    """Roots of f in F_p, ascending."""
    return sorted(r for r in range(p) if peval(f, r, p) == 0)


# ---------------------------------------------------------------------------
# finite fields
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _least_irreducible(p: int, k: int):
    """Lexicographically least monic irreducible of degree k over F_p,
    ordering monic polynomials by sum(c_i * p^i) of the lower coefficients."""
    if k == 1:
        return (0, 1)
    for idx in range(p**k):
        coeffs, m = [], idx
        for _ in range(k):
            coeffs.append(m % p)
            m //= p
        f = tuple(coeffs) + (1,)
        # irreducible iff x^(p^k) = x mod f and gcd(x^(p^j) - x, f) = 1 for j < k
        x = (0, 1)
        ok = True
        for j in range(1, k // 2 + 1):
            xq = ppowmod(x, p**j, f, p)
            if len(pgcd(psub(xq, x, p), f, p)) > 1:
                ok = False
                break
        if ok:
            xq = ppowmod(x, p**k, f, p)
            if psub(xq, x, p) == ():
                return f
    raise AssertionError("no irreducible found")


def FiniteField(p: int, k: int = 1, modulus: tuple = None) -> "FiniteFieldType":
    return _finite_field_interned(p, k, tuple(modulus) if modulus is not None else None)


@lru_cache(maxsize=None)
def _finite_field_interned(p, k, modulus):
    return FiniteFieldType(p, k, modulus)


class FiniteFieldType:
    """Descriptor for F_{p^k}; elements are coordinate vectors mod p in the
    polynomial basis of the (lexicographically least) modulus.

    Interned via the FiniteField() factory so elements of the same field
    compare directly.
    """

    def __init__(self, p, k=1, modulus=None):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if k < 1:
            raise ValueError("degree must be >= 1")
        self.p = p
        self.k = k
        self.modulus = modulus if modulus is not None else _least_irreducible(p, k)
        if len(self.modulus) != k + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of the stated degree")
        self.order = p**k
        self._sqrt_table = None

    def __repr__(self):
        return f"GF({self.p})" if self.k == 1 else f"GF({self.p}^{self.k})"

    def elem(self, coords) -> "FFElement":
        if isinstance(coords, FFElement):
            if coords.field is not self:
                raise ValueError("element of a different field")
            return coords
        if isinstance(coords, int):
            c = [coords % self.p] + [0] * (self.k - 1)
            return FFElement(self, tuple(c))
        if isinstance(coords, Fraction):
            num = coords.numerator % self.p
            den = coords.denominator % self.p
            if den == 0:
                raise NonIntegralError(f"denominator of {coords} vanishes mod {self.p}")
            return self.elem(num * pow(den, -1, self.p))
        coords = [c % self.p for c in coords]
        if len(coords) > self.k:
            raise ValueError("too many coordinates")
        coords += [0] * (self.k - len(coords))
        return FFElement(self, tuple(coords))

    def zero(self):
        return self.elem(0)

    def one(self):
        return self.elem(1)

    def from_index(self, idx: int) -> "FFElement":
        coords = []
        for _ in range(self.k):
            coords.append(idx % self.p)
            idx //= self.p
        return FFElement(self, tuple(coords))

    def elements(self):
        """All field elements in canonical (index) order."""
        for idx in range(self.order):
            yield self.from_index(idx)

    def coerce(self, value):
        """Accept ints, Fractions and elements of subfields with the same p."""
        if isinstance(value, FFElement):
            if value.field is self:
                return value
            if value.field.p == self.p and value.field.k == 1:
                return self.elem(value.coords[0])
            raise ValueError("cannot coerce between these fields")
        return self.elem(value)


@dataclass(frozen=True)
class FFElement:
    field: FiniteFieldType
    coords: tuple

    def index(self) -> int:
        idx = 0
        for c in reversed(self.coords):
            idx = idx * self.field.p + c
        return idx

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def __add__(self, other):
        other = self.field.coerce(other)
        p = self.field.p
        return FFElement(self.field, tuple((a + b) % p for a, b in zip(self.coords, other.coords)))

    def __radd__(self, other):
        return self + other

    def __sub__(self, other):
        other = self.field.coerce(other)
        p = self.field.p
        return FFElement(self.field, tuple((a - b) % p for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return -(self - other)

    def __neg__(self):
        p = self.field.p
        return FFElement(self.field, tuple(-a % p for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, int) or isinstance(other, Fraction):
            other = self.field.coerce(other)
        p = self.field.p
        prod = pmul(self.coords, other.coords, p)
        rem = pdivmod(prod, self.field.modulus, p)[1]
        rem = list(rem) + [0] * (self.field.k - len(rem))
        return FFElement(self.field, tuple(rem))

    def __rmul__(self, other):
        return self * other

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        p = self.field.p
        # extended Euclid in F_p[x]
        a, b = _ptrim(self.coords), self.field.modulus
        s0, s1 = (1,), ()
        while b:
            q, r = pdivmod(a, b, p)
            a, b = b, r
            s0, s1 = s1, psub(s0, pmul(q, s1, p), p)
        inv_lc = pow(a[-1], -1, p)
        s0 = _ptrim([c * inv_lc % p for c in s0])
        s0 = pdivmod(s0, self.field.modulus, p)[1]
        return self.field.elem(list(s0))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.field.coerce(other) / self

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        r = self.field.one()
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            try:
                other = self.field.coerce(other)
            except (ValueError, NonIntegralError):
                return NotImplemented
        if not isinstance(other, FFElement):
            return NotImplemented
        return self.field is other.field and self.coords == other.coords

    def __hash__(self):
        return hash((id(self.field), self.coords))

    def __lt__(self, other):
        return self.index() < other.index()

    def __repr__(self):
        if self.field.k == 1:
            return str(self.coords[0])
        return str(list(self.coords))

    def to_json(self):
        return list(self.coords)


def ff_sqrt(x: FFElement):
    """Least y (in canonical element order) with y*y = x, or None.

    Exhaustive search below 10**6 elements, Tonelli-Shanks above; the two
    agree because both return the smaller of the two roots.
    """
    field = x.field
    if x.is_zero():
        return field.zero()
    if field.order < 10**6:
        if field._sqrt_table is None:
            table = {}
            for e in field.elements():
                sq = e * e
                idx = sq.index()
                prev = table.get(idx)
                if prev is None or e.index() < prev.index():
                    table[idx] = e
            field._sqrt_table = table
        return field._sqrt_table.get(x.index())
    if field.p == 2:
        # squaring is a bijection in characteristic 2
        return x ** (field.order // 2)
    q = field.order
    if x ** ((q - 1) // 2) != field.one():
        return None
    # Tonelli-Shanks in the multiplicative group of F_q
    s, e = q - 1, 0
    while s % 2 == 0:
        s //= 2
        e += 1
    n = None
    for cand in field.elements():
        if not cand.is_zero() and cand ** ((q - 1) // 2) != field.one():
            n = cand
            break
    y = x ** ((s + 1) // 2)
    b = x**s
    g = n**s
    r = e
    while True:
        t, m = b, 0
        while t != field.one():
            t = t * t
            m += 1
        if m == 0:
            break
        gs = g ** (2 ** (r - m - 1))
        g = gs * gs
        y = y * gs
        b = b * g
        r = m
    return min(y, -y)


# ---------------------------------------------------------------------------
# number fields
# ---------------------------------------------------------------------------

def _qptrim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return tuple(f)


def _qpmul(f, g):
    if not f or not g:
        return ()
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return _qptrim(out)


def _qpdivmod(f, g):
    f = list(f)
    q = [Fraction(0)] * max(0, len(f) - len(g) + 1)
    while len(f) >= len(g) and _qptrim(f):
        if f[-1] == 0:
            f.pop()
            continue
        d = len(f) - len(g)
        c = Fraction(f[-1], 1) / g[-1]
        q[d] = c
        for i, b in enumerate(g):
            f[d + i] -= c * b
        f.pop()
    return _qptrim(q), _qptrim(f)


def _rational_roots(f):
    """Rational roots of an integer polynomial (via the rational root test)."""
    f = [int(c) for c in f]
    while f and f[0] == 0:
        f = f[1:]  # factor out x
    if not f:
        return []
    lead, const = f[-1], f[0]
    roots = set()
    for dn in range(1, abs(lead) + 1):
        if lead % dn:
            continue
        for nm in range(abs(const) + 1):
            if const % max(nm, 1):
                continue
            for cand in {Fraction(nm, dn), Fraction(-nm, dn)}:
                val = sum(c * cand**i for i, c in enumerate(f))
                if val == 0:
                    roots.add(cand)
    return sorted(roots)


def _check_irreducible(poly: tuple[int, ...]):
    """Verify irreducibility over Q at desk degrees.

    Strategy: rational-root test (conclusive through degree 3), then look
    for a prime where the reduction is irreducible, then rule out factor
    degrees by intersecting mod-p factorization shapes.
    """
    n = len(poly) - 1
    if n == 1:
        return
    if _rational_roots(poly):
        raise ValueError("defining polynomial has a rational root")
    if n <= 3:
        return
    possible = set(range(1, n))  # degrees a proper factor could have
    checked = 0
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101):
        if poly[-1] % p == 0:
            continue
        fact = poly_factor_mod(poly, p)
        if any(m > 1 for _, m in fact):
            continue  # p divides the discriminant; shape unreliable
        degs = [len(g) - 1 for g, m in fact for _ in range(m)]
        if len(degs) == 1:
            return  # irreducible mod p, hence over Q
        sums = {0}
        for d in degs:
            sums |= {s + d for s in sums}
        possible &= sums
        if not possible:
            return
        checked += 1
        if checked >= 12:
            break
    raise ValueError("could not certify irreducibility of the defining polynomial")


def NumberField(poly, name: str = "a") -> "NumberFieldType":
    return _number_field_interned(tuple(int(c) for c in poly), name)


@lru_cache(maxsize=None)
def _number_field_interned(poly, name):
    return NumberFieldType(poly, name)


class NumberFieldType:
    """Q[x]/(f) for a monic irreducible integer polynomial f of degree <= 8.

    Degree 1 (f = x) is allowed and plays the role of Q itself.
    """

    def __init__(self, poly, name="a"):
        poly = tuple(int(c) for c in poly)
        if len(poly) < 2 or poly[-1] != 1:
            raise ValueError("defining polynomial must be monic of degree >= 1")
        if len(poly) > 9:
            raise ValueError("degree > 8 unsupported")
        if len(poly) > 2 or poly != (0, 1):
            _check_irreducible(poly)
        self.poly = poly
        self.degree = len(poly) - 1
        self.name = name
        self._fpoly = tuple(Fraction(c) for c in poly)

    def __repr__(self):
        if self.degree == 1:
            return "QQ"
        return f"NumberField({list(self.poly)}, {self.name!r})"

    def elem(self, coords) -> "NFElement":
        if isinstance(coords, NFElement):
            if coords.field is not self:
                raise ValueError("element of a different number field")
            return coords
        if isinstance(coords, (int, Fraction)):
            c = [Fraction(coords)] + [Fraction(0)] * (self.degree - 1)
            return NFElement(self, tuple(c))
        coords = [Fraction(c) for c in coords]
        if len(coords) > self.degree:
            raise ValueError("too many coordinates")
        coords += [Fraction(0)] * (self.degree - len(coords))
        return NFElement(self, tuple(coords))

    def gen(self) -> "NFElement":
        if self.degree == 1:
            return self.elem(-self.poly[0])
        return self.elem([0, 1])

    def zero(self):
        return self.elem(0)

    def one(self):
        return self.elem(1)

    def coerce(self, value):
        return self.elem(value)


@dataclass(frozen=True)
class NFElement:
    field: NumberFieldType
    coords: tuple  # Fractions, length = degree

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def is_rational(self):
        return all(c == 0 for c in self.coords[1:])

    def __add__(self, other):
        other = self.field.coerce(other)
        return NFElement(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __radd__(self, other):
        return self + other

    def __sub__(self, other):
        other = self.field.coerce(other)
        return NFElement(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return -(self - other)

    def __neg__(self):
        return NFElement(self.field, tuple(-a for a in self.coords))

    def __mul__(self, other):
        other = self.field.coerce(other)
        prod = _qpmul(self.coords, other.coords)
        rem = _qpdivmod(prod, self.field._fpoly)[1]
        rem = list(rem) + [Fraction(0)] * (self.field.degree - len(rem))
        return NFElement(self.field, tuple(rem))

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        other = self.field.coerce(other)
        return self * other.inv()

    def __rtruediv__(self, other):
        return self.field.coerce(other) / self

    def inv(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        # extended Euclid over Q[x]
        a, b = _qptrim(self.coords), self.field._fpoly
        s_a, s_b = (Fraction(1),), ()
        while b:
            q, r = _qpdivmod(a, b)
            new_s = _qpsub(s_a, _qpmul(q, s_b))
            a, b = b, r
            s_a, s_b = s_b, new_s
        # a is now a nonzero constant gcd
        c = a[0]
        coeffs = [x / c for x in s_a]
        rem = _qpdivmod(tuple(coeffs), self.field._fpoly)[1]
        return self.field.elem(list(rem))

    def __pow__(self, n):
        if n < 0:
            return self.inv() ** (-n)
        r = self.field.one()
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.coerce(other)
        if not isinstance(other, NFElement):
            return NotImplemented
        return self.field is other.field and self.coords == other.coords

    def __hash__(self):
        return hash((id(self.field), self.coords))

    def denominator(self) -> int:
        d = 1
        for c in self.coords:
            d = d * c.denominator // math.gcd(d, c.denominator)
        return d

    def conj(self):
        """Galois conjugate; quadratic fields only."""
        if self.field.degree != 2:
            raise ValueError("conjugation implemented for quadratic fields only")
        a1 = Fraction(self.field.poly[1])
        c0, c1 = self.coords
        return self.field.elem([c0 - a1 * c1, -c1])

    def norm(self) -> Fraction:
        """Field norm down to Q (via the resultant for quadratics; product of
        conjugate evaluations is avoided to stay exact)."""
        if self.field.degree == 1:
            return self.coords[0]
        if self.field.degree == 2:
            prod = self * self.conj()
            assert prod.is_rational()
            return prod.coords[0]
        raise ValueError("norm implemented for degree <= 2 only")

    def __repr__(self):
        if self.field.degree == 1:
            return str(self.coords[0])
        name = self.field.name
        parts = []
        for i, c in enumerate(self.coords):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                var = name if i == 1 else f"{name}^{i}"
                parts.append(f"{c}*{var}" if abs(c) != 1 else (var if c > 0 else f"-{var}"))
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self):
        return [str(c) for c in self.coords]


def _qpsub(f, g):
    n = max(len(f), len(g))
    return _qptrim([
        (f[i] if i < len(f) else Fraction(0)) - (g[i] if i < len(g) else Fraction(0))
        for i in range(n)
    ])


QQ = NumberField((0, 1), "r")  # the rationals as a degree-1 number field


@dataclass(frozen=True)
class PrimeOfField:
    """Prime of a number field above p, given by an irreducible factor g of
    the defining polynomial mod p, with ramification e and residue degree f."""

    field: NumberFieldType
    p: int
    g: tuple
    e: int
    fdeg: int

    def __repr__(self):
        return f"({self.p}, {list(self.g)}) e={self.e} f={self.fdeg}"


def _dedekind_index_ok(poly, p, factorization) -> bool:
    """Dedekind criterion: True when p does not divide the index of the
    equation order, so the factor-mod-p rule is valid at p."""
    if all(m == 1 for _, m in factorization):
        return True
    gbar = (1,)
    hbar = (1,)
    for g, m in factorization:
        gbar = pmul(gbar, g, p)
        if m > 1:
            hbar = pmul(hbar, g, p) if m == 2 else pmul(hbar, ppow_plain(g, m - 1, p), p)
    # lift g, h to Z[x] with coefficients in [0, p)
    gh = [0] * (len(gbar) + len(hbar) - 1)
    for i, a in enumerate(gbar):
        for j, b in enumerate(hbar):
            gh[i + j] += a * b
    diff = list(poly) + [0] * max(0, len(gh) - len(poly))
    gh = gh + [0] * max(0, len(poly) - len(gh))
    t = [(x - y) // p if (x - y) % p == 0 else None for x, y in zip(gh, diff)]
    if any(c is None for c in t):
        # g*h = f mod p holds by construction, so entries are divisible
        raise AssertionError("dedekind lift mismatch")
    tbar = pmod(t, p)
    u = pgcd(pgcd(tbar, gbar, p), hbar, p)
    return len(u) == 1


def ppow_plain(f, n, p):
    r = (1,)
    while n:
        if n & 1:
            r = pmul(r, f, p)
        f = pmul(f, f, p)
        n >>= 1
    return r


def primes_above(K: NumberFieldType, p: int) -> list[PrimeOfField]:
    """Primes of K above p via factorization of the defining polynomial.

    Raises UnsupportedPrimeError when p divides the index obstruction of the
    equation order (never silently returns wrong splitting data).
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if K.degree == 1:
        return [PrimeOfField(K, p, (0, 1), 1, 1)]
    fact = poly_factor_mod(K.poly, p)
    if not _dedekind_index_ok(K.poly, p, fact):
        raise UnsupportedPrimeError(
            f"prime {p} divides the index obstruction of {K}; splitting unsupported"
        )
    return [PrimeOfField(K, p, g, m, len(g) - 1) for g, m in fact]


_EMBED_CACHE: dict = {}


def _embedding_roots(P: PrimeOfField, k: int):
    """Roots of P.g in the standard field F_{p^k} (all embeddings of the
    residue field); empty unless fdeg divides k."""
    key = (id(P.field), P.p, P.g, k)
    if key in _EMBED_CACHE:
        return _EMBED_CACHE[key]
    field = FiniteField(P.p, k)
    if k % P.fdeg != 0:
        roots = []
    elif field.order > 10**6:
        raise ValueError("residue field too large to embed")
    else:
        roots = []
        for e in field.elements():
            acc = field.zero()
            for c in reversed(P.g):
                acc = acc * e + field.elem(c)
            if acc.is_zero():
                roots.append(e)
        assert len(roots) == (P.fdeg if k % P.fdeg == 0 else 0)
    _EMBED_CACHE[key] = roots
    return roots


def residue_map(x: NFElement, P: PrimeOfField, k: int = None) -> FFElement:
    """Image of x in the residue field of P, represented inside the standard
    F_{p^k} (k defaults to the residue degree) via the least root of g."""
    if k is None:
        k = P.fdeg
    roots = _embedding_roots(P, k)
    if not roots:
        raise ValueError(f"residue field of {P} does not embed in F_{P.p}^{k}")
    return _evaluate_at_root(x, P, roots[0])


def residue_maps_all(x: NFElement, P: PrimeOfField, k: int) -> list[FFElement]:
    """Images of x under every embedding of the residue field into F_{p^k}."""
    return [_evaluate_at_root(x, P, r) for r in _embedding_roots(P, k)]


def _evaluate_at_root(x: NFElement, P: PrimeOfField, root: FFElement):
    p = P.p
    den = x.denominator()
    if den % p == 0:
        # p divides a coordinate denominator; the element can still be
        # integral at this particular prime (split case), so decide by the
        # exact valuation where we can compute it
        val = None
        if x.field.degree <= 2:
            val = nf_valuation(x, P)
        if val is None or val == INFINITE_VALUATION or val < 0:
            raise NonIntegralError(f"{x} is not integral at {P}", val)
        if P.fdeg == 1:
            # unique residue c in F_p with v(x - c) >= 1
            for c in range(p):
                if nf_valuation(x - c, P) >= 1:
                    return root.field.elem(c)
            raise AssertionError("no residue found for an integral element")
        raise NonIntegralError(
            f"cannot reduce {x} at {P}: denominator meets p in an inert prime"
        )
    field = root.field
    inv_den = pow(den % p, -1, p)
    acc = field.zero()
    for c in reversed(x.coords):
        num = (c.numerator * (den // c.denominator)) % p
        acc = acc * root + field.elem(num * inv_den)
    return acc


INFINITE_VALUATION = math.inf


def nf_valuation(x: NFElement, P: PrimeOfField):
    """Normalized valuation at P with v(p) = e.

    Exact for quadratic fields (split/inert/ramified case analysis) and for
    the rationals; degree-1 unramified primes of larger fields are handled
    when the element is p-integral; anything else raises.
    """
    if x.is_zero():
        return INFINITE_VALUATION
    K = x.field
    p = P.p
    if K.degree == 1:
        r = x.coords[0]
        return valuation(r.numerator, p) - valuation(r.denominator, p)
    if K.degree == 2:
        den = x.denominator()
        y = x * den
        dval = valuation(den, p) if den % p == 0 else 0
        # y has integer coordinates now; peel the rational p-content
        m = min(
            valuation(int(c), p) if c != 0 else math.inf for c in y.coords
        )
        if m is math.inf:
            raise AssertionError("zero slipped through")
        z = y * Fraction(1, p**m)
        nrm = z.norm()
        t = valuation(nrm.numerator, p)
        if P.e == 2:
            # ramified: v(z) = v_p(N(z)); total v(y) = 2m + that
            vz = t
            return 2 * m + vz - 2 * dval
        if P.fdeg == 2:
            # inert: v(z) = v_p(N(z)) / 2
            assert t % 2 == 0
            return m + t // 2 - dval
        # split: z has integer coordinates with a p-unit among them, so one
        # of v_P(z), v_Pbar(z) is zero; decide which by the residue at P
        r = (-P.g[0]) % p
        acc = 0
        for c in reversed(z.coords):
            acc = (acc * r + c.numerator) % p
        if acc != 0:
            return m - dval
        return m + t - dval
    # degree > 2: only the trivially-integral unramified degree-1 situation
    raise ValueError("valuations in fields of degree > 2 are unsupported")


def nf_sqrt(v: NFElement):
    """Square root in a quadratic field (or in Q), if one exists, else None."""
    K = v.field
    if v.is_zero():
        return K.zero()
    if K.degree == 1 or v.is_rational():
        c = v.coords[0]
        if c < 0:
            if K.degree == 1:
                return None
        else:
            if is_square(c.numerator) and is_square(c.denominator):
                root = Fraction(math.isqrt(c.numerator), math.isqrt(c.denominator))
                return K.elem(root)
        if K.degree == 1:
            return None
    if K.degree != 2:
        raise ValueError("nf_sqrt implemented for degree <= 2")
    # theta^2 = -a1*theta - a0; solve (x + y*theta)^2 = v exactly
    a0, a1 = Fraction(K.poly[0]), Fraction(K.poly[1])
    c0, c1 = v.coords
    # (x + y t)^2 = x^2 - a0 y^2 + (2xy - a1 y^2) t
    # c1 = y(2x - a1 y); c0 = x^2 - a0 y^2
    # if y = 0 handled above; assume y != 0: x = (c1/y + a1 y)/2
    # substitute: quartic in y with only even powers
    #   (c1 + a1 y^2)^2 / (4 y^2) - a0 y^2 = c0
    #   (a1^2 - 4a0) y^4 + (2 a1 c1 - 4 c0) y^2 + c1^2 = 0
    A = a1 * a1 - 4 * a0
    B = 2 * a1 * c1 - 4 * c0
    C = c1 * c1
    if A == 0:
        raise ValueError("degenerate quadratic field")
    disc = B * B - 4 * A * C
    sq = nf_sqrt(QQ.elem(disc)) if disc >= 0 else None
    candidates = []
    if sq is not None:
        d = sq.coords[0]
        for sgn in (1, -1):
            y2 = (-B + sgn * d) / (2 * A)
            if y2 == 0:
                continue
            if y2 > 0 and is_square(y2.numerator) and is_square(y2.denominator):
                y = Fraction(math.isqrt(y2.numerator), math.isqrt(y2.denominator))
                if c1 == 0:
                    # pure-theta square: x = 0 allowed
                    for yy in (y, -y):
                        cand = K.elem([0, yy])
                        if cand * cand == v:
                            return cand
                else:
                    x = (c1 / y + a1 * y) / 2
                    cand = K.elem([x, y])
                    if cand * cand == v:
                        return cand
                    cand = K.elem([-x, -y])
                    if cand * cand == v:
                        return cand
    return None
