#!/usr/bin/env python3
"""Generate the embedded modular-curve registry (src/cuspred/data/registry.json).

Runs once, offline, with sympy + mpmath as the independent computer-algebra
layer: division polynomials locate torsion packets over number fields,
rational factorization isolates the orbit polynomials, high-precision
numerics guess coordinates, and every guess is re-verified exactly with the
package's own field/curve arithmetic before anything is written.

Usage: python3 scripts/generate_registry.py [--out PATH]
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from fractions import Fraction

import mpmath
import sympy

from cuspred.arith import factor_small
from cuspred.curves import (
    CurvePoint,
    WeierstrassCurve,
    rational_torsion,
    _int_poly_disc,
)
from cuspred.fields import NumberField, NumberFieldType

mpmath.mp.dps = 60

X = sympy.symbols("x")

SEXTIC_Z13 = (-1, 3, 6, -4, -5, 1, 1)  # minimal polynomial of zeta13 + 1/zeta13
QUARTIC_Z15 = (1, 4, -4, -1, 1)        # minimal polynomial of zeta15 + 1/zeta15


# ---------------------------------------------------------------------------
# division polynomials for a long Weierstrass model (as x-polynomials)
# ---------------------------------------------------------------------------

class DivPolys:
    """psi_n represented as (pure x-polynomial, parity) with the actual
    psi_n = poly * psi2^parity and psi2^2 = 4x^3 + b2 x^2 + 2 b4 x + b6."""

    def __init__(self, E: WeierstrassCurve):
        b2, b4, b6, b8 = (sympy.Rational(v) for v in (E.b2, E.b4, E.b6, E.b8))
        self.B = sympy.Poly(4 * X**3 + b2 * X**2 + 2 * b4 * X + b6, X, domain="QQ")
        one = sympy.Poly(1, X, domain="QQ")
        zero = sympy.Poly(0, X, domain="QQ")
        psi3 = sympy.Poly(
            3 * X**4 + b2 * X**3 + 3 * b4 * X**2 + 3 * b6 * X + b8, X, domain="QQ"
        )
        psi4g = sympy.Poly(
            2 * X**6
            + b2 * X**5
            + 5 * b4 * X**4
            + 10 * b6 * X**3
            + 10 * b8 * X**2
            + (b2 * b8 - b4 * b6) * X
            + (b4 * b8 - b6 * b6),
            X,
            domain="QQ",
        )
        self.cache = {
            -1: (-one, 0),
            0: (zero, 0),
            1: (one, 0),
            2: (one, 1),
            3: (psi3, 0),
            4: (psi4g, 1),
        }

    def _mul(self, a, b):
        (f, e1), (g, e2) = a, b
        e = e1 + e2
        poly = f * g * self.B ** (e // 2)
        return (poly, e % 2)

    def _pow(self, a, n):
        r = (sympy.Poly(1, X, domain="QQ"), 0)
        for _ in range(n):
            r = self._mul(r, a)
        return r

    def _sub(self, a, b):
        (f, e1), (g, e2) = a, b
        assert e1 == e2, "parity mismatch in psi recursion"
        return (f - g, e1)

    def _div_psi2(self, a):
        f, e = a
        if e == 1:
            return (f, 0)
        q, r = sympy.div(f, self.B, X)
        assert r.is_zero, "psi2 division not exact"
        return (sympy.Poly(q, X, domain="QQ"), 1)

    def psi(self, n):
        if n in self.cache:
            return self.cache[n]
        if n % 2 == 1:
            m = (n - 1) // 2
            val = self._sub(
                self._mul(self.psi(m + 2), self._pow(self.psi(m), 3)),
                self._mul(self.psi(m - 1), self._pow(self.psi(m + 1), 3)),
            )
        else:
            m = n // 2
            inner = self._sub(
                self._mul(self.psi(m + 2), self._pow(self.psi(m - 1), 2)),
                self._mul(self.psi(m - 2), self._pow(self.psi(m + 1), 2)),
            )
            val = self._div_psi2(self._mul(self.psi(m), inner))
        self.cache[n] = val
        return val

    def multiplication_fiber(self, n, x0):
        """x-polynomial whose roots are x(P) for the points P with x(nP) = x0."""
        nsq = self._pow(self.psi(n), 2)
        nprod = self._mul(self.psi(n - 1), self.psi(n + 1))
        lhs = self._mul((sympy.Poly(X - sympy.Rational(x0), X, domain="QQ"), 0), nsq)
        f, e = self._sub(lhs, nprod)
        assert e == 0
        return f

    def torsion_poly(self, n):
        f, e = self.psi(n)
        return f * self.B if e == 1 else f


# ---------------------------------------------------------------------------
# numeric-guess / exact-verify helpers
# ---------------------------------------------------------------------------

def field_roots(K: NumberFieldType):
    poly = [mpmath.mpf(c) for c in reversed(K.poly)]
    return mpmath.polyroots(poly, maxsteps=500, extraprec=200)


def eval_elem(elem, root):
    acc = root * 0
    for c in reversed(elem.coords):
        acc = acc * root + mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
    return acc


def rationalize(value, max_den=10**12):
    if abs(mpmath.im(value)) > mpmath.mpf(10) ** (-25):
        return None
    v = mpmath.re(value)
    fr = Fraction(mpmath.nstr(v, 40)).limit_denominator(max_den)
    if abs(mpmath.mpf(fr.numerator) / mpmath.mpf(fr.denominator) - v) < mpmath.mpf(10) ** (-20):
        return fr
    return None


def element_from_values(K: NumberFieldType, roots, values):
    """The K-element taking the given value at each embedding, or None."""
    n = K.degree
    A = mpmath.matrix(n, n)
    b = mpmath.matrix(n, 1)
    for i in range(n):
        for j in range(n):
            A[i, j] = roots[i] ** j
        b[i] = values[i]
    try:
        sol = mpmath.lu_solve(A, b)
    except (ZeroDivisionError, ValueError):
        return None
    coords = []
    for i in range(n):
        fr = rationalize(sol[i])
        if fr is None:
            return None
        coords.append(fr)
    return K.elem(coords)


def sqrt_in_field(K: NumberFieldType, v, roots=None):
    """Exact square root of v in K, or None (numeric guess, exact verify)."""
    if roots is None:
        roots = field_roots(K)
    vals = [eval_elem(v, r) for r in roots]
    base = [mpmath.sqrt(val) for val in vals]
    for signs in itertools.product((1, -1), repeat=K.degree):
        cand = element_from_values(K, roots, [s * bv for s, bv in zip(signs, base)])
        if cand is not None and cand * cand == v:
            return cand
    return None


def curve_over(K: NumberFieldType, E: WeierstrassCurve) -> WeierstrassCurve:
    return WeierstrassCurve([K.elem(c) for c in E.coefficients], K)


def points_above_x(K: NumberFieldType, E: WeierstrassCurve, x_elem, roots=None):
    """Points of E over K with the given x-coordinate (up to 2)."""
    EK = curve_over(K, E)
    b = EK.a1 * x_elem + EK.a3
    c = -(x_elem**3 + EK.a2 * x_elem * x_elem + EK.a4 * x_elem + EK.a6)
    disc = b * b - 4 * c
    s = sqrt_in_field(K, disc, roots)
    if s is None:
        return []
    y1 = (-b + s) / 2
    y2 = (-b - s) / 2
    out = [CurvePoint(x_elem, y1)]
    if y2 != y1:
        out.append(CurvePoint(x_elem, y2))
    for pt in out:
        assert EK.is_on(pt), "extracted point fails the curve equation"
    return out


def point_order(K, E, pt, bound=40):
    EK = curve_over(K, E)
    R = pt
    for n in range(1, bound + 1):
        if R.is_infinity:
            return n
        R = EK.add(R, pt)
    return None


def conjugate_point_count(K, E, pt):
    roots = field_roots(K)
    seen = []
    eps = mpmath.mpf(10) ** -20
    for r in roots:
        xv, yv = eval_elem(pt.x, r), eval_elem(pt.y, r)
        if not any(abs(xv - a) < eps and abs(yv - b) < eps for a, b in seen):
            seen.append((xv, yv))
    return len(seen)


# ---------------------------------------------------------------------------
# orbit discovery via fiber polynomials
# ---------------------------------------------------------------------------

def _disc_supported(factor, allowed_primes):
    disc = sympy.Rational(sympy.discriminant(factor.as_expr(), X))
    num = int(disc.p) * int(disc.q)
    if num == 0:
        return False
    return all(p in allowed_primes for p, _ in factor_small(num).factors)


def torsion_orbits_from_fibers(E, n, base_points, allowed_primes, want_degree,
                               expected_order):
    dp = DivPolys(E)
    results = []
    seen_fields = set()
    for r in base_points:
        poly = dp.multiplication_fiber(n, r.x)
        _, factors = sympy.Poly(poly, X, domain="QQ").factor_list()
        for fac, _mult in factors:
            if fac.degree() != want_degree:
                continue
            raw = list(reversed(fac.monic().all_coeffs()))
            if any(sympy.Rational(c).q != 1 for c in raw):
                continue
            coeffs = tuple(int(c) for c in raw)
            if coeffs in seen_fields:
                continue
            seen_fields.add(coeffs)
            if not _disc_supported(fac, allowed_primes):
                continue
            try:
                K = NumberField(coeffs)
            except ValueError:
                continue
            roots = field_roots(K)
            for pt in points_above_x(K, E, K.gen(), roots):
                order = point_order(K, E, pt)
                if order != expected_order:
                    continue
                size = conjugate_point_count(K, E, pt)
                results.append((K, pt, order, size))
    return results


# ---------------------------------------------------------------------------
# registry assembly
# ---------------------------------------------------------------------------

def cusp_entry(field_poly, pt, orbit, rational, note=None):
    entry = {
        "field_poly": [int(c) for c in field_poly],
        "orbit": int(orbit),
        "rational": bool(rational),
    }
    if isinstance(pt, str):  # infinity markers
        entry["x"] = pt
        entry["y"] = pt
    elif pt is None:
        entry["x"] = None
        entry["y"] = None
        entry["declared"] = True
    else:
        x, y = pt
        if isinstance(x, (Fraction, int)):
            entry["x"] = [str(Fraction(x))]
            entry["y"] = [str(Fraction(y))]
        else:
            entry["x"] = [str(c) for c in x.coords]
            entry["y"] = [str(c) for c in y.coords]
    if note:
        entry["note"] = note
    return entry


def rational_cusp_entries(E):
    tor = rational_torsion(E)
    entries = []
    for pt in tor:
        if pt.is_infinity:
            entries.append(cusp_entry((0, 1), "inf", 1, True))
        else:
            entries.append(cusp_entry((0, 1), (pt.x, pt.y), 1, True))
    return entries, len(tor)


def build_genus1(label, level, coeffs, total_cusps, orbit_entries,
                 torsion_exponent, provenance):
    E = WeierstrassCurve(coeffs)
    entries, tor_order = rational_cusp_entries(E)
    entries.extend(orbit_entries)
    declared_total = sum(e["orbit"] for e in entries)
    assert declared_total == total_cusps, (label, declared_total, total_cusps)
    bad = {p for p, _ in factor_small(int(E.delta)).factors}
    assert all(level % p == 0 for p in bad), (label, bad, level)
    return {
        "label": label,
        "level": level,
        "model": [str(c) for c in coeffs],
        "genus": 1,
        "torsion_order": tor_order,
        "torsion_exponent": torsion_exponent,
        "rational_cusp_count": tor_order,
        "total_cusp_count": total_cusps,
        "cusps": entries,
        "provenance": provenance,
    }


def verified_orbit_entry(E, K, pt, expect_order, expect_size, note=None):
    EK = curve_over(K, E)
    assert EK.is_on(pt), "orbit representative not on curve"
    order = point_order(K, E, pt)
    assert order == expect_order, (order, expect_order)
    size = conjugate_point_count(K, E, pt)
    assert size == expect_size, (size, expect_size)
    return cusp_entry(K.poly, (pt.x, pt.y), size, False, note)


# ---------------------------------------------------------------------------
# the genus-2 cusp orbit
# ---------------------------------------------------------------------------

def extend_point_to_degree6(E, K3, needed_primes=()):
    """Lift points whose x lives in a cubic field but whose y needs a
    quadratic extension: build a degree-6 field generated by y + t*x (small
    t chosen so the equation order supports prime splitting at every needed
    prime), express x and y inside it, and verify everything exactly."""
    from cuspred.fields import primes_above, UnsupportedPrimeError

    roots3 = field_roots(K3)
    a1, a2, a3, a4, a6 = (mpmath.mpf(str(c)) for c in E.coefficients)
    pairs = []  # (x-value, y-value) over all six embeddings
    for r in roots3:
        b = a1 * r + a3
        c = -(r**3 + a2 * r * r + a4 * r + a6)
        s = mpmath.sqrt(mpmath.mpc(b * b - 4 * c))
        pairs.append((r, (-b + s) / 2))
        pairs.append((r, (-b - s) / 2))
    eps = mpmath.mpf(10) ** -25
    def _candidates():
        for cy in (1, 2, 7, 14, 3, 6):
            for t in range(-4, 5):
                for s in range(-4, 5):
                    yield cy, t, s

    for cy, t, s in _candidates():
        zvals = [cy * yv + t * xv + s * xv * xv for xv, yv in pairs]
        if any(abs(u - v) < eps for u, v in itertools.combinations(zvals, 2)):
            continue  # not a primitive element
        poly = [mpmath.mpc(1)]
        for zv in zvals:
            nxt = [mpmath.mpc(0)] * (len(poly) + 1)
            for idx, co in enumerate(poly):
                nxt[idx] += co * (-zv)
                nxt[idx + 1] += co
            poly = nxt
        coeffs = []
        ok = True
        for co in poly:  # already low-to-high
            fr = rationalize(co)
            if fr is None or fr.denominator != 1:
                ok = False
                break
            coeffs.append(int(fr))
        if not ok or coeffs[-1] != 1:
            continue
        try:
            K6 = NumberField(tuple(coeffs))
        except ValueError:
            continue
        try:
            for p in needed_primes:
                primes_above(K6, p)
        except UnsupportedPrimeError:
            continue
        roots6 = field_roots(K6)
        xvals, yvals = [], []
        matched = True
        for z6 in roots6:
            match = None
            for xv, yv in pairs:
                if abs(z6 - (cy * yv + t * xv + s * xv * xv)) < eps:
                    match = (xv, yv)
                    break
            if match is None:
                matched = False
                break
            xvals.append(match[0])
            yvals.append(match[1])
        if not matched:
            continue
        xel = element_from_values(K6, roots6, xvals)
        yel = element_from_values(K6, roots6, yvals)
        if xel is None or yel is None:
            continue
        acc = K6.zero()
        for cc in reversed(K3.poly):
            acc = acc * xel + K6.elem(cc)
        if not acc.is_zero():
            continue
        pt = CurvePoint(xel, yel)
        if curve_over(K6, E).is_on(pt):
            print(f"  degree-6 generator {cy}*y + {t}*x + {s}*x^2 works: {K6.poly}")
            return K6, pt
    raise SystemExit("no usable degree-6 generator found")


def find_x113_orbit(f13):
    """Locate the six conjugate cusps of the genus-2 model: their x-values
    satisfy a 13-ramified cyclic cubic and f(x) is 13 times a square in the
    cubic field, putting y = s*sqrt(13) inside the real sextic field."""
    ffrac = [Fraction(c) for c in f13]

    def f_at(el):
        acc = el.field.zero()
        for c in reversed(ffrac):
            acc = acc * el + el.field.elem(c)
        return acc

    hits = []
    for a in range(-6, 7):
        for b in range(-6, 7):
            for c in range(-6, 7):
                poly = (c, b, a, 1)
                disc = int(sympy.discriminant(sympy.Poly([1, a, b, c], X).as_expr(), X))
                if disc <= 0 or disc % 169 != 0:
                    continue
                fs = factor_small(disc)
                if any(e % 2 for p, e in fs.factors):
                    continue  # need a square discriminant (cyclic cubic)
                if any(p != 13 for p, e in fs.factors):
                    continue  # ramified only at 13
                try:
                    K3 = NumberField(poly)
                except ValueError:
                    continue
                roots3 = field_roots(K3)
                eta = K3.gen()
                val = f_at(eta)
                s = sqrt_in_field(K3, val * Fraction(1, 13), roots3)
                if s is not None:
                    hits.append((poly, K3, eta, s))
    if not hits:
        return None
    hits.sort(key=lambda h: h[0])
    poly, K3, eta, s = hits[0]
    print(f"X1_13: cusp x-cubic {poly}, scaled root {s}")
    return assemble_sextic_cusp(f13, K3, eta, s)


def assemble_sextic_cusp(f13, K3, eta, s):
    """Build the cusp (eta, s*sqrt(13)) exactly inside the real sextic
    subfield of the 13th cyclotomic field."""
    K6 = NumberField(SEXTIC_Z13)
    roots6 = field_roots(K6)
    # sqrt(13) in K6: numeric sign search, exact verification
    sqrt13 = sqrt_in_field(K6, K6.elem(13), roots6)
    assert sqrt13 is not None, "sqrt(13) not found in the sextic field"
    # embed the cubic field: its generator takes 3 values, each twice
    roots3 = field_roots(K3)
    for assign in itertools.permutations(roots3):
        # eta's embedding values per K6-root: determined by choosing which
        # cubic root each sextic root restricts to; Galois forces each value
        # to occur exactly twice, so run over matchings of the 6 slots
        for pattern in set(itertools.permutations([0, 0, 1, 1, 2, 2])):
            vals = [assign[i] for i in pattern]
            xel = element_from_values(K6, roots6, vals)
            if xel is None:
                continue
            acc = K6.zero()
            for cc in reversed(K3.poly):
                acc = acc * xel + K6.elem(cc)
            if not acc.is_zero():
                continue
            # y = s(eta) * sqrt(13), with s rewritten via eta -> xel
            sel = K6.zero()
            for cc in reversed(s.coords):
                sel = sel * xel + K6.elem(cc)
            yel = sel * sqrt13
            fval = K6.zero()
            for cc in reversed([Fraction(c) for c in f13]):
                fval = fval * xel + K6.elem(cc)
            if yel * yel == fval:
                return K6, xel, yel
        break  # matching already covers all assignments of values to slots
    return None


# ---------------------------------------------------------------------------

def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="src/cuspred/data/registry.json")
    args = ap.parse_args()

    registry = {}

    registry["X0_20"] = build_genus1(
        "X0_20", 20, [0, 1, 0, 4, 4], 6, [], 6,
        "model fixed by the descent normal form; the six rational cusps are "
        "the full rational torsion, found by bounded search and cross-checked "
        "against reduction counts",
    )

    registry["X0_24"] = build_genus1(
        "X0_24", 24, [0, -1, 0, -4, 4], 8, [], 4,
        "standard conductor-24 model with torsion order 8 (exponent 4); all "
        "cusps rational",
    )

    E32 = WeierstrassCurve([0, 0, 0, -1, 0])
    Ki = NumberField((1, 0, 1), "i")
    i = Ki.gen()
    orb32 = [
        verified_orbit_entry(E32, Ki, CurvePoint(i, Ki.one() - i), 4, 2),
        verified_orbit_entry(E32, Ki, CurvePoint(i, i - Ki.one()), 4, 2),
    ]
    registry["X0_32"] = build_genus1(
        "X0_32", 32, [0, 0, 0, -1, 0], 8, orb32, 4,
        "of the two conductor-32 torsion-4 models, this one has a surjective "
        "x-map on F_3-points; non-rational cusps are the two conjugate pairs "
        "of extra 4-torsion over Q(i)",
    )

    E36 = WeierstrassCurve([0, 0, 0, 0, 1])
    Kz6 = NumberField((1, -1, 1), "w")
    w = Kz6.gen()
    orb36 = [
        verified_orbit_entry(E36, Kz6, CurvePoint(w, Kz6.zero()), 2, 2),
        verified_orbit_entry(E36, Kz6, CurvePoint(-2 * w, Kz6.elem(-3)), 6, 2),
        verified_orbit_entry(E36, Kz6, CurvePoint(-2 * w, Kz6.elem(3)), 6, 2),
    ]
    registry["X0_36"] = build_genus1(
        "X0_36", 36, [0, 0, 0, 0, 1], 12, orb36, 6,
        "non-rational cusps are the translates of the rational torsion by the "
        "extra 2-torsion over Q(sqrt(-3)); together they exhaust the torsion "
        "over that field",
    )

    # X0(49): kernel of the degree-7 isogeny
    E49 = WeierstrassCurve([1, -1, 0, -2, -1])
    psi7 = DivPolys(E49).torsion_poly(7)
    _, fac7 = sympy.Poly(psi7, X, domain="QQ").factor_list()
    cubics = sorted(
        (f for f, _ in fac7 if f.degree() == 3 and _disc_supported(f, {7})),
        key=lambda f: tuple(f.all_coeffs()),
    )
    print("X0_49: 7-kernel cubic factors:", [f.as_expr() for f in cubics])
    assert cubics, "no 7-kernel cubic found"
    raw = list(reversed(cubics[0].monic().all_coeffs()))
    K49 = NumberField(tuple(int(c) for c in raw))
    roots49 = field_roots(K49)
    pts49 = points_above_x(K49, E49, K49.gen(), roots49)
    orb49 = []
    if pts49:
        for pt in pts49:
            orb49.append(
                verified_orbit_entry(
                    E49, K49, pt, 7, 3,
                    "order-7 kernel point over the real cubic subfield of the "
                    "7th cyclotomic field",
                )
            )
    else:
        K6_49, pt49 = extend_point_to_degree6(E49, K49, needed_primes=(2, 3, 5, 11, 13))
        print("X0_49: kernel points lifted to sextic field", K6_49.poly)
        orb49.append(
            verified_orbit_entry(
                E49, K6_49, pt49, 7, 6,
                "order-7 kernel point; x generates the real cubic subfield of "
                "the 7th cyclotomic field, y needs a quadratic extension",
            )
        )
    registry["X0_49"] = build_genus1(
        "X0_49", 49, [1, -1, 0, -2, -1], 8, orb49, 14,
        "standard conductor-49 model, rational torsion of order 2; the six "
        "non-rational cusps form the kernel of the degree-7 isogeny, located "
        "by factoring the 7-division polynomial",
    )

    # X1(11): order-25 quintic orbit
    E11 = WeierstrassCurve([0, -1, 1, 0, 0])
    tor11 = [p for p in rational_torsion(E11) if not p.is_infinity]
    found11 = torsion_orbits_from_fibers(E11, 5, tor11, {11}, 5, 25)
    print(f"X1_11: {len(found11)} quintic order-25 candidates")
    assert found11
    found11.sort(key=lambda t: (t[0].poly, tuple(str(c) for c in t[1].x.coords),
                                tuple(str(c) for c in t[1].y.coords)))
    K11, pt11, _, _ = found11[0]
    orb11 = [
        verified_orbit_entry(
            E11, K11, pt11, 25, 5,
            "order-25 torsion over the degree-5 real subfield of the 11th "
            "cyclotomic field (a degree-3 field cannot carry an orbit of "
            "size 5); one Galois orbit among the conjugate candidates is "
            "recorded",
        )
    ]
    registry["X1_11"] = build_genus1(
        "X1_11", 11, [0, -1, 1, 0, 0], 10, orb11, 25,
        "five rational cusps = rational torsion; the five conjugate cusps "
        "form an orbit of order-25 points located via the multiplication-by-5 "
        "fiber over the rational 5-torsion",
    )

    # X1(14): two cubic orbits of order-9 points
    E14 = WeierstrassCurve([1, 0, 1, -1, 0])
    tor14 = rational_torsion(E14)
    assert len(tor14) == 6
    found14 = torsion_orbits_from_fibers(
        E14, 3, [p for p in tor14 if not p.is_infinity], {7}, 3, 9
    )
    print(f"X1_14: {len(found14)} cubic order-9 candidates")
    uniq, seen = [], set()
    for K, pt, order, size in found14:
        key = (K.poly, tuple(str(c) for c in pt.x.coords),
               tuple(str(c) for c in pt.y.coords))
        if key not in seen:
            seen.add(key)
            uniq.append((K, pt, order, size))
    uniq.sort(key=lambda t: (t[0].poly, tuple(str(c) for c in t[1].x.coords),
                             tuple(str(c) for c in t[1].y.coords)))
    assert len(uniq) >= 2, f"expected two cubic orbits, found {len(uniq)}"
    # keep two orbits that are not Galois-translates of each other: distinct
    # x-coordinates suffice since conjugates share the x-minimal polynomial
    picked = [uniq[0]]
    for cand in uniq[1:]:
        if all(cand[1].x != other[1].x or cand[1].y != other[1].y for other in picked):
            picked.append(cand)
        if len(picked) == 2:
            break
    orb14 = [
        verified_orbit_entry(
            E14, K, pt, 9, 3,
            "order-9 torsion over the real cubic subfield of the 7th "
            "cyclotomic field; order-18 translates exist over the same field, "
            "and the recorded identification follows the declared counts",
        )
        for (K, pt, _, _) in picked
    ]
    registry["X1_14"] = build_genus1(
        "X1_14", 14, [1, 0, 1, -1, 0], 12, orb14, 18,
        "six rational cusps = rational torsion; two conjugate orbits of size "
        "3 located via the multiplication-by-3 fiber",
    )

    # X1(15): order-8 quadratic orbits + two declared quartic orbits
    E15 = WeierstrassCurve([1, 1, 1, 0, 0])
    z3 = w - 1  # primitive cube root of unity in Q(zeta6)
    orb15 = [
        verified_orbit_entry(E15, Kz6, CurvePoint(z3, Kz6.elem(-1)), 8, 2),
        verified_orbit_entry(E15, Kz6, CurvePoint(z3, Kz6.one() - w), 8, 2),
    ]
    quartic_note = (
        "declared orbit: four conjugate cusps over a degree-4 subfield of the "
        "15th cyclotomic field; coordinates are not shipped because the "
        "shipped tooling does not certify them, and no verification path "
        "consumes them (the field has no degree-1 primes at the audited "
        "primes)"
    )
    orb15.append(cusp_entry(QUARTIC_Z15, None, 4, False, quartic_note))
    orb15.append(cusp_entry(QUARTIC_Z15, None, 4, False, quartic_note))
    registry["X1_15"] = build_genus1(
        "X1_15", 15, [1, 1, 1, 0, 0], 16, orb15, 8,
        "four rational cusps = rational torsion; the two orbits of size 2 are "
        "order-8 points over Q(sqrt(-3)) obtained by halving the rational "
        "4-torsion; the two quartic orbits are declared by count",
    )

    # X1(13): genus-2 model
    f13 = [1, -4, 6, -2, 1, -2, 1]
    disc13 = int(_int_poly_disc(f13))
    support = {p for p, _ in factor_small(disc13).factors}
    print("X1_13 model disc support:", support)
    assert support <= {2, 13}
    cusps13 = [
        cusp_entry((0, 1), "inf+", 1, True),
        cusp_entry((0, 1), "inf-", 1, True),
        cusp_entry((0, 1), (Fraction(0), Fraction(1)), 1, True),
        cusp_entry((0, 1), (Fraction(0), Fraction(-1)), 1, True),
        cusp_entry((0, 1), (Fraction(1), Fraction(1)), 1, True),
        cusp_entry((0, 1), (Fraction(1), Fraction(-1)), 1, True),
    ]
    sextic = find_x113_orbit(f13)
    if sextic is not None:
        K6, xel, yel = sextic
        cusps13.append(
            cusp_entry(
                K6.poly, (xel, yel), 6, False,
                "orbit of six conjugate cusps over the real sextic subfield "
                "of the 13th cyclotomic field; x generates its cubic "
                "subfield, y needs sqrt(13)",
            )
        )
        print("X1_13: sextic orbit recorded with exact coordinates")
    else:
        cusps13.append(
            cusp_entry(
                SEXTIC_Z13, None, 6, False,
                "declared orbit: six conjugate cusps over the real sextic "
                "subfield of the 13th cyclotomic field; coordinates are not "
                "shipped and no verification path consumes them",
            )
        )
        print("X1_13: sextic orbit declared without coordinates")
    registry["X1_13"] = {
        "label": "X1_13",
        "level": 13,
        "model": None,
        "hyperelliptic_model": [str(c) for c in f13],
        "genus": 2,
        "torsion_order": None,
        "torsion_exponent": None,
        "rational_cusp_count": 6,
        "total_cusp_count": 12,
        "cusps": cusps13,
        "point_counts": {"2": 6},
        "count_note": (
            "the y^2 = f(x) shape degenerates at 2, so the count over F_2 is "
            "shipped data rather than a sweep; the abstract curve has good "
            "reduction there"
        ),
        "provenance": (
            "classical hyperelliptic model; its six small rational points are "
            "exactly the six rational cusps"
        ),
    }

    with open(args.out, "w") as fh:
        json.dump(registry, fh, indent=1, sort_keys=True)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
