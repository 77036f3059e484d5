"""Elliptic curve engine over exact coefficient domains.

Long Weierstrass models y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over
the rationals, small number fields, or finite fields, with the chord-tangent
group law, reduction mod primes, exhaustive point enumeration over finite
fields, bounded rational torsion, and a brute-force point counter for
hyperelliptic genus-2 models.

Models are used exactly as given; no minimal-model machinery.  A non-minimal
model can show spurious bad reduction, so callers that care compare against
the discriminant factorization of the shipped model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import factor_small, is_square, valuation
from .fields import (
    INFINITE_VALUATION,
    FFElement,
    FiniteField,
    FiniteFieldType,
    NFElement,
    NonIntegralError,
    NumberFieldType,
    PrimeOfField,
    QQ,
    ff_sqrt,
    nf_valuation,
    residue_map,
)


class BadReductionError(ValueError):
    """The model reduces to a singular cubic at this prime."""


class NonIntegralModelError(ValueError):
    """A model coefficient has a pole at this prime."""


class TorsionSearchError(RuntimeError):
    """The bounded point search and the reduction bound disagree."""


_INF = "inf"


@dataclass(frozen=True)
class CurvePoint:
    """Affine point (x, y) or the point at infinity (x = y = None)."""

    x: object = None
    y: object = None

    @property
    def is_infinity(self):
        return self.x is None

    def __repr__(self):
        return "inf" if self.is_infinity else f"({self.x}, {self.y})"

    def to_json(self):
        if self.is_infinity:
            return _INF
        return [_coord_json(self.x), _coord_json(self.y)]


INFINITY = CurvePoint()


def _coord_json(c):
    if isinstance(c, (FFElement, NFElement)):
        return c.to_json()
    return str(c)


class _RationalDomain:
    """Adapter making Fraction look like the field element classes."""

    degree = 1

    @staticmethod
    def coerce(v):
        if isinstance(v, Fraction):
            return v
        if isinstance(v, int):
            return Fraction(v)
        raise TypeError(f"cannot coerce {v!r} into Q")

    @staticmethod
    def zero():
        return Fraction(0)

    @staticmethod
    def one():
        return Fraction(1)


RationalDomain = _RationalDomain()


def _domain_of(field):
    if field is None or field == "Q":
        return RationalDomain
    return field


class WeierstrassCurve:
    """Long Weierstrass model over an exact field.

    `field` is None (rationals), a NumberFieldType, or a FiniteFieldType.
    """

    def __init__(self, coeffs, field=None):
        self.field = field
        dom = _domain_of(field)
        a1, a2, a3, a4, a6 = (dom.coerce(c) for c in coeffs)
        self.a1, self.a2, self.a3, self.a4, self.a6 = a1, a2, a3, a4, a6
        self.b2 = a1 * a1 + 4 * a2
        self.b4 = 2 * a4 + a1 * a3
        self.b6 = a3 * a3 + 4 * a6
        self.b8 = (
            a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        )
        self.c4 = self.b2 * self.b2 - 24 * self.b4
        self.c6 = -self.b2**3 + 36 * self.b2 * self.b4 - 216 * self.b6
        self.delta = (
            -self.b2 * self.b2 * self.b8
            - 8 * self.b4**3
            - 27 * self.b6 * self.b6
            + 9 * self.b2 * self.b4 * self.b6
        )
        if self._is_zero(self.delta):
            raise BadReductionError("singular Weierstrass model")
        # internal consistency of the formulary
        assert self._eq(4 * self.b8, self.b2 * self.b6 - self.b4 * self.b4)

    # -- small domain helpers -------------------------------------------------

    def _is_zero(self, v):
        if isinstance(v, (FFElement, NFElement)):
            return v.is_zero()
        return v == 0

    def _eq(self, u, v):
        return self._is_zero(u - v)

    def coerce(self, v):
        return _domain_of(self.field).coerce(v)

    @property
    def coefficients(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def j_invariant(self):
        """j = c4^3 / delta."""
        return self.c4**3 / self.delta

    def __repr__(self):
        return f"WeierstrassCurve({list(self.coefficients)} over {self.field or 'Q'})"

    def to_json(self):
        return {
            "field": repr(self.field) if self.field is not None else "Q",
            "coefficients": [_coord_json(c) for c in self.coefficients],
        }

    # -- point predicates and the group law ----------------------------------

    def rhs_discrepancy(self, x, y):
        return (
            y * y + self.a1 * x * y + self.a3 * y
            - (x**3 + self.a2 * x * x + self.a4 * x + self.a6)
        )

    def is_on(self, pt: CurvePoint) -> bool:
        if pt.is_infinity:
            return True
        return self._is_zero(self.rhs_discrepancy(pt.x, pt.y))

    def point(self, x, y) -> CurvePoint:
        pt = CurvePoint(self.coerce(x), self.coerce(y))
        if not self.is_on(pt):
            raise ValueError(f"({x}, {y}) is not on {self!r}")
        return pt

    def neg(self, pt: CurvePoint) -> CurvePoint:
        if pt.is_infinity:
            return pt
        return CurvePoint(pt.x, -pt.y - self.a1 * pt.x - self.a3)

    def add(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        if not (self.is_on(P) and self.is_on(Q)):
            raise ValueError("point not on curve")
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
        if self._eq(x1, x2):
            if self._eq(y1 + y2 + self.a1 * x2 + self.a3, self.coerce(0)):
                return INFINITY
            lam = (3 * x1 * x1 + 2 * self.a2 * x1 + self.a4 - self.a1 * y1) / (
                2 * y1 + self.a1 * x1 + self.a3
            )
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam + self.a1 * lam - self.a2 - x1 - x2
        y3 = lam * (x1 - x3) - y1 - self.a1 * x3 - self.a3
        return CurvePoint(x3, y3)

    def mul(self, n: int, P: CurvePoint) -> CurvePoint:
        if n < 0:
            return self.mul(-n, self.neg(P))
        R = INFINITY
        Q = P
        while n:
            if n & 1:
                R = self.add(R, Q)
            Q = self.add(Q, Q)
            n >>= 1
        return R

    def order_of(self, P: CurvePoint, bound: int = 200) -> int | None:
        """Order of P if it divides some n <= bound, else None."""
        R = P
        for n in range(1, bound + 1):
            if R.is_infinity:
                return n
            R = self.add(R, P)
        return None


def point_add(E, P, Q):
    return E.add(P, Q)


def point_neg(E, P):
    return E.neg(P)


def scalar_mul(E, n, P):
    return E.mul(n, P)


def curve_j_invariant(E: WeierstrassCurve):
    return E.j_invariant()


# ---------------------------------------------------------------------------
# reduction
# ---------------------------------------------------------------------------

def reduce_curve(E: WeierstrassCurve, prime) -> WeierstrassCurve:
    """Coefficientwise reduction at a rational prime (curve over Q) or a
    PrimeOfField (curve over a number field)."""
    if isinstance(prime, int):
        if E.field is not None:
            raise TypeError("integer prime only valid for curves over Q")
        p = prime
        F = FiniteField(p)
        coeffs = []
        for c in E.coefficients:
            if c.denominator % p == 0:
                raise NonIntegralModelError(f"coefficient {c} not integral at {p}")
            coeffs.append(F.elem(c))
        try:
            return WeierstrassCurve(coeffs, F)
        except BadReductionError:
            raise BadReductionError(f"bad reduction at {p}") from None
    P = prime
    F = FiniteField(P.p, P.fdeg)
    coeffs = []
    for c in E.coefficients:
        try:
            coeffs.append(residue_map(c, P))
        except NonIntegralError as e:
            raise NonIntegralModelError(str(e)) from None
    try:
        return WeierstrassCurve(coeffs, F)
    except BadReductionError:
        raise BadReductionError(f"bad reduction at {P}") from None


def reduce_point(E: WeierstrassCurve, pt: CurvePoint, prime) -> CurvePoint:
    """Reduce a point with projective normalization: coordinates with poles
    of the balanced shape v(x) = -2n, v(y) = -3n map to infinity."""
    if pt.is_infinity:
        return INFINITY
    if isinstance(prime, int):
        p = prime
        vx = _rational_valuation(pt.x, p)
        vy = _rational_valuation(pt.y, p)
        if vx >= 0 and vy >= 0:
            F = FiniteField(p)
            red = CurvePoint(F.elem(pt.x), F.elem(pt.y))
        elif vx < 0:
            _check_pole_balance(vx, vy)
            return INFINITY
        else:
            raise NonIntegralError(f"unbalanced pole at {p}: v(x)={vx}, v(y)={vy}")
    else:
        P = prime
        vx = nf_valuation(pt.x, P)
        vy = nf_valuation(pt.y, P)
        if (vx == INFINITE_VALUATION or vx >= 0) and (vy == INFINITE_VALUATION or vy >= 0):
            red = CurvePoint(residue_map(pt.x, P), residue_map(pt.y, P))
        elif vx != INFINITE_VALUATION and vx < 0:
            _check_pole_balance(vx, vy)
            return INFINITY
        else:
            raise NonIntegralError(f"unbalanced pole at {P}: v(x)={vx}, v(y)={vy}")
    return red


def _rational_valuation(c: Fraction, p: int):
    if c == 0:
        return INFINITE_VALUATION
    return valuation(c.numerator, p) - valuation(c.denominator, p)


def _check_pole_balance(vx, vy):
    # on a Weierstrass curve a pole of x forces v(x) = -2n, v(y) = -3n
    if vx % 2 != 0 or vy != 3 * vx // 2:
        raise NonIntegralError(f"unsupported valuation configuration: v(x)={vx}, v(y)={vy}")


# ---------------------------------------------------------------------------
# enumeration over finite fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FinitePointSet:
    curve: WeierstrassCurve
    points: tuple
    order: int

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, pt):
        return pt in self.points


def _solve_quadratic_char2(field, b, c):
    """Roots of y^2 + b y + c = 0 over a char-2 field."""
    if field.order <= 4096:
        return [y for y in field.elements() if (y * y + b * y + c).is_zero()]
    if b.is_zero():
        r = ff_sqrt(c)  # squaring is bijective in char 2
        return [-r] if r is not None else []
    # substitute y = b z: z^2 + z = c / b^2
    w = c / (b * b)
    k = field.k
    if k % 2 == 1:
        # half-trace solves z^2 + z = w when Tr(w) = 0
        z = field.zero()
        t = w
        for i in range(0, k, 2):
            z = z + t
            t = (t * t) * (t * t)  # t^(2^2)
        if (z * z + z + w).is_zero():
            return sorted({b * z, b * z + b})
        return []
    raise NotImplementedError("large even-degree char-2 fields are unsupported")


def enumerate_points(E: WeierstrassCurve) -> FinitePointSet:
    """Complete point list of a curve over F_{p^k} by x-sweep plus infinity."""
    field = E.field
    if not isinstance(field, FiniteFieldType):
        raise TypeError("enumerate_points needs a curve over a finite field")
    if field.order > 10**6:
        raise ValueError("field too large for exhaustive enumeration")
    pts = [INFINITY]
    two = field.elem(2)
    char2 = field.p == 2
    for x in field.elements():
        bb = E.a1 * x + E.a3
        cc = -(x**3 + E.a2 * x * x + E.a4 * x + E.a6)
        if char2:
            ys = _solve_quadratic_char2(field, bb, cc)
        else:
            disc = bb * bb - 4 * cc
            r = ff_sqrt(disc)
            if r is None:
                ys = []
            elif r.is_zero():
                ys = [(-bb) / two]
            else:
                ys = [(-bb + r) / two, (-bb - r) / two]
        for y in ys:
            pts.append(CurvePoint(x, y))
    order = len(pts)
    # Hasse bound sanity for genuine elliptic curves
    q = field.order
    assert (order - (q + 1)) ** 2 <= 4 * q, "Hasse bound violated"
    key = lambda pt: (-1, -1) if pt.is_infinity else (pt.x.index(), pt.y.index())
    pts.sort(key=key)
    return FinitePointSet(E, tuple(pts), order)


def x_image_full(E: WeierstrassCurve) -> bool:
    """True iff the x-map hits every point of P^1(F_q): the image of the
    point set under x, plus infinity, is all of F_q plus infinity.

    Set-wise definition, so it also makes sense in characteristic 2.
    """
    field = E.field
    if not isinstance(field, FiniteFieldType):
        raise TypeError("x_image_full needs a curve over a finite field")
    image = {pt.x for pt in enumerate_points(E).points if not pt.is_infinity}
    return len(image) == field.order


# ---------------------------------------------------------------------------
# rational torsion
# ---------------------------------------------------------------------------

def _good_odd_primes(E, count):
    primes = []
    p = 3
    delta_num = E.delta.numerator * E.delta.denominator
    den_lcm = 1
    for c in E.coefficients:
        den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
    while len(primes) < count:
        if delta_num % p and den_lcm % p:
            primes.append(p)
        p += 2
        while not _is_prime_small(p):
            p += 2
    return primes


def _is_prime_small(n):
    if n < 2:
        return False
    for d in range(2, int(math.isqrt(n)) + 1):
        if n % d == 0:
            return False
    return True


def torsion_candidate_points(E: WeierstrassCurve, num_bound=10**4, den_bound=4):
    """Affine points with x = m/e^2 for |m| <= num_bound, e <= den_bound and
    rational y; candidates for torsion on an integral model."""
    found = []
    for e in range(1, den_bound + 1):
        e2 = Fraction(1, e * e)
        for m in range(-num_bound, num_bound + 1):
            x = m * e2
            bb = E.a1 * x + E.a3
            cc = -(x**3 + E.a2 * x * x + E.a4 * x + E.a6)
            disc = bb * bb - 4 * cc
            if disc < 0:
                continue
            if is_square(disc.numerator) and is_square(disc.denominator):
                r = Fraction(math.isqrt(disc.numerator), math.isqrt(disc.denominator))
                for y in {(-bb + r) / 2, (-bb - r) / 2}:
                    found.append(CurvePoint(x, y))
    return found


def rational_torsion(E: WeierstrassCurve):
    """Exact rational torsion subgroup of an integral model over Q.

    Bounded point search cross-checked against #E(F_p) divisibility at good
    odd primes; a disagreement raises TorsionSearchError instead of guessing.
    """
    if E.field is not None:
        raise TypeError("rational_torsion expects a curve over Q")
    primes = _good_odd_primes(E, 8)
    bound = 0
    counts = []
    for p in primes:
        Ep = reduce_curve(E, p)
        counts.append(enumerate_points(Ep).order)
        g = counts[0]
        for c in counts[1:]:
            g = math.gcd(g, c)
        bound = g
        if bound == 1:
            break
    torsion = {INFINITY}
    for pt in torsion_candidate_points(E):
        if pt in torsion:
            continue
        n = E.order_of(pt, bound=16)
        if n is not None and bound % n == 0:
            # fold the whole cyclic group generated by pt into the set
            R = pt
            while not R.is_infinity:
                torsion.add(R)
                R = E.add(R, pt)
    # close under addition (the candidate set is closed enough at desk scale,
    # but a final closure pass keeps the result honest)
    changed = True
    while changed:
        changed = False
        snapshot = list(torsion)
        for P in snapshot:
            for Q in snapshot:
                S = E.add(P, Q)
                if S not in torsion:
                    torsion.add(S)
                    changed = True
    if bound % len(torsion) != 0:
        # impossible for a genuine torsion subgroup; flags a search defect
        raise TorsionSearchError(
            f"search found a group of order {len(torsion)} but reduction bound is {bound}"
        )
    if len(torsion) != bound:
        # The gcd of reduction counts can genuinely overestimate (a curve can
        # have 8 | #E(F_p) for every good odd p while its rational torsion has
        # order 4).  The search side is exhaustive for integral models: by the
        # integrality theorem for torsion points, x-coordinates lie in
        # (1/4) * Z within the searched height range.  So the search is
        # authoritative provided the model is integral; otherwise fail loudly.
        if any(c.denominator != 1 for c in E.coefficients):
            raise TorsionSearchError(
                f"torsion search inconclusive on a non-integral model: "
                f"found {len(torsion)}, bound {bound}"
            )
    pts = sorted(
        torsion,
        key=lambda pt: (0, 0, 0) if pt.is_infinity else (1, pt.x, pt.y),
    )
    return pts


# ---------------------------------------------------------------------------
# potential good reduction; genus-2 counts
# ---------------------------------------------------------------------------

def is_potentially_good(E: WeierstrassCurve, prime: PrimeOfField) -> bool:
    """True iff the j-invariant is integral at the prime."""
    j = E.j_invariant()
    if isinstance(j, Fraction):
        v = _rational_valuation(j, prime.p if isinstance(prime, PrimeOfField) else prime)
    else:
        v = nf_valuation(j, prime)
    return v == INFINITE_VALUATION or v >= 0


def _int_poly_disc(f):
    """Discriminant of an integer polynomial via the Euclidean resultant."""
    f = [Fraction(c) for c in f]
    df = [i * c for i, c in enumerate(f)][1:]

    def resultant(a, b):
        a = list(a)
        b = list(b)
        res = Fraction(1)
        while True:
            while b and b[-1] == 0:
                b.pop()
            if not b:
                return Fraction(0)
            if len(b) == 1:
                return res * b[0] ** (len(a) - 1)
            # a = q*b + r
            r = list(a)
            while len(r) >= len(b):
                if r[-1] == 0:
                    r.pop()
                    continue
                c = r[-1] / b[-1]
                d = len(r) - len(b)
                for i in range(len(b)):
                    r[d + i] -= c * b[i]
                r.pop()
            while r and r[-1] == 0:
                r.pop()
            if not r:
                return Fraction(0)
            res *= b[-1] ** (len(a) - len(r)) * (-1) ** ((len(a) - 1) * (len(b) - 1))
            a, b = b, r

    n = len(f) - 1
    res = resultant(f, df)
    sign = (-1) ** (n * (n - 1) // 2)
    return sign * res / f[-1]


def hyperelliptic_count(f, p: int) -> int:
    """Points of the smooth projective model of y^2 = f(x) over F_p.

    deg f in {5, 6}; affine count by x-sweep plus 2/1/0 points at infinity
    according to whether the leading coefficient is a square, the degree is
    odd, or the leading coefficient is a non-square.
    """
    f = [Fraction(c) for c in f]
    deg = len(f) - 1
    if deg not in (5, 6):
        raise ValueError("hyperelliptic_count expects a degree 5 or 6 model")
    if p == 2 or not _is_prime_small(p) or p > 10**3:
        raise ValueError(f"unsupported prime {p}")
    disc = _int_poly_disc(f)
    lead = f[-1]
    if lead.numerator % p == 0 or any(c.denominator % p == 0 for c in f):
        raise BadReductionError(f"model degenerates at {p}")
    if disc.numerator % p == 0:
        raise BadReductionError(f"bad reduction at {p}")
    squares = {pow(x, 2, p) for x in range(1, p)}
    count = 0
    for x in range(p):
        v = 0
        for c in reversed(f):
            v = (v * x + c.numerator * pow(c.denominator, -1, p)) % p
        if v == 0:
            count += 1
        elif v in squares:
            count += 2
    if deg == 5:
        count += 1
    else:
        lead_res = lead.numerator * pow(lead.denominator, -1, p) % p
        if lead_res in squares:
            count += 2
    return count
