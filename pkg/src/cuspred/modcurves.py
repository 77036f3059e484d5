"""Registry of genus-1 modular curve models with cusp data, plus the
cusp-reduction hypothesis checkers.

Two hypotheses are audited for a registry curve at a prime p:

* the "weaker" one: every point of the reduction mod p (over F_{p^k}) is the
  reduction of a cusp, rational or not;
* the "stronger" one: every F_p-point is the reduction of a *rational* cusp
  and the x-map is surjective on F_p-points.

The registry ships as JSON data generated offline by an independent
computer-algebra pass (scripts/generate_registry.py) and is re-validated at
load time by `registry_verify`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from importlib import resources

from .arith import factor_small
from .curves import (
    INFINITY,
    BadReductionError,
    CurvePoint,
    WeierstrassCurve,
    enumerate_points,
    hyperelliptic_count,
    rational_torsion,
    reduce_curve,
    reduce_point,
    x_image_full,
    _int_poly_disc,
)
from .fields import (
    FiniteField,
    NumberField,
    NumberFieldType,
    PrimeOfField,
    UnsupportedPrimeError,
    _embedding_roots,
    _evaluate_at_root,
    primes_above,
)

REGISTRY_LABELS = (
    "X0_20", "X0_24", "X0_32", "X0_36", "X0_49",
    "X1_11", "X1_13", "X1_14", "X1_15",
)


@dataclass(frozen=True)
class CuspRecord:
    """One Galois orbit of cusps: a representative point over its field of
    definition, or a declared orbit (size and field only)."""

    field: NumberFieldType
    x: object          # NFElement / Fraction / "inf" marker / None
    y: object
    orbit: int
    rational: bool
    note: str = ""

    @property
    def is_infinity(self):
        return isinstance(self.x, str)

    @property
    def declared_only(self):
        return self.x is None

    def point(self) -> CurvePoint:
        if self.is_infinity:
            return INFINITY
        return CurvePoint(self.x, self.y)


@dataclass(frozen=True)
class ModularCurveRecord:
    label: str
    level: int
    genus: int
    curve: object                 # WeierstrassCurve over Q, or None (genus 2)
    hyperelliptic: tuple          # coefficient tuple for genus 2, else ()
    torsion_order: object
    torsion_exponent: object
    rational_cusp_count: int
    total_cusp_count: int
    cusps: tuple
    provenance: str
    point_counts: dict = dc_field(default_factory=dict)
    count_note: str = ""


_DEFAULT_REGISTRY = None


def _parse_cusp(raw) -> CuspRecord:
    K = NumberField(tuple(raw["field_poly"]))
    if isinstance(raw["x"], str):  # infinity marker ("inf", "inf+", "inf-")
        x = raw["x"]
        y = raw["y"]
    elif raw["x"] is None:
        x = None
        y = None
    else:
        if K.degree == 1:
            x = Fraction(raw["x"][0])
            y = Fraction(raw["y"][0])
        else:
            x = K.elem([Fraction(c) for c in raw["x"]])
            y = K.elem([Fraction(c) for c in raw["y"]])
    return CuspRecord(K, x, y, int(raw["orbit"]), bool(raw["rational"]),
                      raw.get("note", ""))


def _parse_record(raw) -> ModularCurveRecord:
    curve = None
    hyper = ()
    if raw.get("model"):
        curve = WeierstrassCurve([Fraction(c) for c in raw["model"]])
    if raw.get("hyperelliptic_model"):
        hyper = tuple(Fraction(c) for c in raw["hyperelliptic_model"])
    return ModularCurveRecord(
        label=raw["label"],
        level=int(raw["level"]),
        genus=int(raw["genus"]),
        curve=curve,
        hyperelliptic=hyper,
        torsion_order=raw.get("torsion_order"),
        torsion_exponent=raw.get("torsion_exponent"),
        rational_cusp_count=int(raw["rational_cusp_count"]),
        total_cusp_count=int(raw["total_cusp_count"]),
        cusps=tuple(_parse_cusp(c) for c in raw["cusps"]),
        provenance=raw.get("provenance", ""),
        point_counts={int(k): int(v) for k, v in raw.get("point_counts", {}).items()},
        count_note=raw.get("count_note", ""),
    )


def load_registry(path=None) -> dict:
    """Load the embedded registry, or a JSON document from an explicit path
    (used for corrupted-fixture testing)."""
    global _DEFAULT_REGISTRY
    if path is None:
        if _DEFAULT_REGISTRY is None:
            text = resources.files("cuspred").joinpath("data/registry.json").read_text()
            _DEFAULT_REGISTRY = {
                label: _parse_record(raw) for label, raw in json.loads(text).items()
            }
        return _DEFAULT_REGISTRY
    with open(path) as fh:
        return {label: _parse_record(raw) for label, raw in json.load(fh).items()}


def registry_get(label: str, registry=None) -> ModularCurveRecord:
    registry = registry if registry is not None else load_registry()
    if label not in registry:
        raise KeyError(f"unknown registry label {label!r}")
    return registry[label]


# ---------------------------------------------------------------------------
# registry validation
# ---------------------------------------------------------------------------

@dataclass
class VerifyReport:
    label: str
    checks: list  # (name, passed, detail)

    @property
    def ok(self):
        return all(passed for _, passed, _ in self.checks)

    def to_json(self):
        return {
            "label": self.label,
            "ok": self.ok,
            "checks": [
                {"name": n, "passed": p, "detail": d} for n, p, d in self.checks
            ],
        }


def _curve_over_field(E: WeierstrassCurve, K: NumberFieldType) -> WeierstrassCurve:
    return WeierstrassCurve([K.elem(c) for c in E.coefficients], K)


def registry_verify(label: str, registry=None) -> VerifyReport:
    """Re-validate every invariant of a registry record; failures become
    report entries, never exceptions."""
    rec = registry_get(label, registry)
    checks = []

    def check(name, passed, detail=""):
        checks.append((name, bool(passed), detail))

    # counts
    declared = sum(c.orbit for c in rec.cusps)
    check("total cusp count", declared == rec.total_cusp_count,
          f"{declared} orbits vs declared {rec.total_cusp_count}")
    rational_records = [c for c in rec.cusps if c.rational]
    check("rational flag iff degree 1",
          all((c.field.degree == 1) == c.rational for c in rec.cusps))
    check("rational cusp count", len(rational_records) == rec.rational_cusp_count,
          f"{len(rational_records)} vs {rec.rational_cusp_count}")
    check("rational cusp bound", rec.rational_cusp_count <= 16)

    if rec.genus == 1:
        E = rec.curve
        bad = {p for p, _ in factor_small(int(E.delta)).factors}
        check("bad primes divide level", all(rec.level % p == 0 for p in bad),
              f"bad={sorted(bad)}, level={rec.level}")
        tor = rational_torsion(E)
        check("rational torsion order", len(tor) == rec.torsion_order,
              f"{len(tor)} vs {rec.torsion_order}")
        check("torsion = rational cusps", len(tor) == rec.rational_cusp_count)
        tor_set = set(tor)
        for idx, c in enumerate(rec.cusps):
            tag = f"cusp[{idx}]"
            if c.declared_only:
                check(f"{tag} declared", True, c.note)
                continue
            if c.rational:
                pt = c.point()
                check(f"{tag} on curve", E.is_on(pt))
                check(f"{tag} is rational torsion", pt in tor_set)
            else:
                EK = _curve_over_field(E, c.field)
                pt = c.point()
                check(f"{tag} on curve", EK.is_on(pt))
                killed = EK.mul(rec.torsion_exponent, pt).is_infinity
                check(f"{tag} torsion exponent", killed,
                      f"exponent {rec.torsion_exponent}")
    else:
        f = rec.hyperelliptic
        disc = _int_poly_disc(list(f))
        support = {p for p, _ in factor_small(int(disc)).factors}
        check("bad primes divide 2*level",
              all(p == 2 or rec.level % p == 0 for p in support),
              f"disc support {sorted(support)}")
        for idx, c in enumerate(rec.cusps):
            tag = f"cusp[{idx}]"
            if c.declared_only:
                check(f"{tag} declared", True, c.note)
                continue
            if c.is_infinity:
                # smooth-model points at infinity exist iff the leading
                # coefficient is a square; it is 1 for the shipped model
                check(f"{tag} at infinity", f[-1] == 1)
                continue
            if c.rational:
                val = sum(co * c.x**i for i, co in enumerate(f))
                check(f"{tag} on curve", c.y * c.y == val)
            else:
                K = c.field
                val = K.zero()
                for co in reversed(f):
                    val = val * c.x + K.elem(co)
                check(f"{tag} on curve", c.y * c.y == val)
    return VerifyReport(rec.label, checks)


# ---------------------------------------------------------------------------
# cusp reduction
# ---------------------------------------------------------------------------

@dataclass
class CuspReductionSet:
    label: str
    p: int
    k: int
    points: frozenset           # reductions of cusps, as points over F_{p^k}
    rational_points: frozenset  # reductions of the rational cusps only
    skipped: tuple              # notes about declared-only orbits not used

    def to_json(self):
        return {
            "label": self.label,
            "p": self.p,
            "k": self.k,
            "points": sorted((pt.to_json() for pt in self.points), key=str),
            "rational_points": sorted((pt.to_json() for pt in self.rational_points), key=str),
            "skipped": list(self.skipped),
        }


def _embed_rational_point(pt: CurvePoint, field) -> CurvePoint:
    if pt.is_infinity:
        return INFINITY
    return CurvePoint(field.elem(pt.x.coords[0]), field.elem(pt.y.coords[0]))


def cusp_reduction_set(label: str, p: int, k: int = 1, registry=None) -> CuspReductionSet:
    """Reductions in F_{p^k} of every cusp whose defining field has a prime
    over p with residue degree dividing k, over every such prime and every
    embedding of its residue field."""
    rec = registry_get(label, registry)
    if rec.genus != 1:
        raise ValueError(f"{label} has genus {rec.genus}; cusp reduction needs genus 1")
    E = rec.curve
    Ek = reduce_curve(E, p)  # raises BadReductionError when p | delta
    F = FiniteField(p, k)
    Ek_big = WeierstrassCurve([F.elem(c.coords[0]) for c in Ek.coefficients], F)
    points = set()
    rational_points = set()
    skipped = []
    for c in rec.cusps:
        if c.declared_only:
            skipped.append(
                f"declared orbit of size {c.orbit} over field {list(c.field.poly)} skipped"
            )
            continue
        if c.rational:
            # reduce over F_p, then view inside F_{p^k}
            base = reduce_point(E, c.point(), p)
            if base.is_infinity:
                red = INFINITY
            else:
                red = CurvePoint(F.elem(base.x.coords[0]), F.elem(base.y.coords[0]))
            assert Ek_big.is_on(red)
            points.add(red)
            rational_points.add(red)
            continue
        K = c.field
        for P in primes_above(K, p):
            if k % P.fdeg != 0:
                continue
            for root in _embedding_roots(P, k):
                fx = _evaluate_at_root(c.x, P, root)
                fy = _evaluate_at_root(c.y, P, root)
                red = CurvePoint(fx, fy)
                assert Ek_big.is_on(red), f"cusp reduction off-curve for {label} at {p}"
                points.add(red)
    return CuspReductionSet(label, p, k, frozenset(points),
                            frozenset(rational_points), tuple(skipped))


# ---------------------------------------------------------------------------
# hypothesis checkers
# ---------------------------------------------------------------------------

@dataclass
class WeakCertificate:
    label: str
    p: int
    k: int
    holds: bool
    curve_points: tuple
    cusp_points: tuple
    skipped: tuple

    def to_json(self):
        return {
            "label": self.label, "p": self.p, "k": self.k, "holds": self.holds,
            "curve_points": [pt.to_json() for pt in self.curve_points],
            "cusp_points": [pt.to_json() for pt in self.cusp_points],
            "skipped": list(self.skipped),
        }


@dataclass
class StrongCertificate:
    label: str
    p: int
    holds: bool
    rational_cover: bool
    x_surjective: bool
    curve_points: tuple
    rational_cusp_points: tuple

    def to_json(self):
        return {
            "label": self.label, "p": self.p, "holds": self.holds,
            "rational_cover": self.rational_cover,
            "x_surjective": self.x_surjective,
            "curve_points": [pt.to_json() for pt in self.curve_points],
            "rational_cusp_points": [pt.to_json() for pt in self.rational_cusp_points],
        }


def _sorted_points(points):
    return tuple(sorted(
        points,
        key=lambda pt: (-1, -1) if pt.is_infinity else (pt.x.index(), pt.y.index()),
    ))


def weaker_holds(label: str, p: int, k: int = 1, registry=None) -> WeakCertificate:
    """Certificate that every F_{p^k}-point of the reduction is the reduction
    of a cusp (rational or not)."""
    rec = registry_get(label, registry)
    crs = cusp_reduction_set(label, p, k, registry)
    Ek = reduce_curve(rec.curve, p)
    F = FiniteField(p, k)
    Ek_big = WeierstrassCurve([F.elem(c.coords[0]) for c in Ek.coefficients], F)
    pts = set(enumerate_points(Ek_big).points)
    holds = pts == set(crs.points)
    return WeakCertificate(label, p, k, holds, _sorted_points(pts),
                           _sorted_points(crs.points), crs.skipped)


def stronger_holds(label: str, p: int, registry=None) -> StrongCertificate:
    """Certificate that every F_p-point reduces from a rational cusp and the
    x-map is surjective on F_p-points (set-wise, so p = 2 is meaningful)."""
    rec = registry_get(label, registry)
    crs = cusp_reduction_set(label, p, 1, registry)
    Ek = reduce_curve(rec.curve, p)
    pts = set(enumerate_points(Ek).points)
    rational_cover = pts == set(crs.rational_points)
    surj = x_image_full(Ek)
    return StrongCertificate(label, p, rational_cover and surj, rational_cover,
                             surj, _sorted_points(pts),
                             _sorted_points(crs.rational_points))


def _primes_up_to(n):
    sieve = [True] * (n + 1)
    out = []
    for i in range(2, n + 1):
        if sieve[i]:
            out.append(i)
            for j in range(i * i, n + 1, i):
                sieve[j] = False
    return out


TABLE_LEVELS = (20, 24, 32, 36, 49)


def hypothesis_table(max_p: int, registry=None) -> dict:
    """For each tabulated level, the good primes p <= max_p where the weaker
    and the stronger hypothesis hold."""
    if max_p < 13:
        raise ValueError("max_p must be at least 13")
    out = {}
    for level in TABLE_LEVELS:
        label = f"X0_{level}"
        weaker, stronger = [], []
        for p in _primes_up_to(max_p):
            try:
                if weaker_holds(label, p, 1, registry).holds:
                    weaker.append(p)
                if stronger_holds(label, p, registry).holds:
                    stronger.append(p)
            except BadReductionError:
                continue
        out[level] = (tuple(weaker), tuple(stronger))
    return out


# the published table this artifact reproduces (weaker, stronger per level)
EXPECTED_TABLE = {
    20: ((3, 7), (3,)),
    24: ((5, 7, 11), (5,)),
    32: ((3, 5), (3,)),
    36: ((5, 7), ()),
    49: ((2,), ()),
}


def split_check(K: NumberFieldType, p: int) -> bool:
    """True iff p is totally split in K: every prime above p has e = f = 1."""
    return all(P.e == 1 and P.fdeg == 1 for P in primes_above(K, p))


# ---------------------------------------------------------------------------
# generator congruence certificates
# ---------------------------------------------------------------------------

def quadratic_twist_curve(E: WeierstrassCurve, d: int) -> WeierstrassCurve:
    """Twist of a rational curve by squarefree d, as y^2 = cubic."""
    A = E.b2 / 4
    B = E.b4 / 2
    C = E.b6 / 4
    return WeierstrassCurve([0, d * A, 0, d * d * B, d**3 * C])


def twist_point_to_field(E: WeierstrassCurve, K: NumberFieldType, d: int,
                         pt: CurvePoint) -> CurvePoint:
    """Map a rational point of the d-twist to a K-point of E, where K
    contains sqrt(d) (K quadratic, disc of its polynomial = d * square)."""
    if pt.is_infinity:
        return INFINITY
    a0, a1 = Fraction(K.poly[0]), Fraction(K.poly[1])
    disc = a1 * a1 - 4 * a0
    ratio = disc / d
    if not (ratio > 0 and ratio.denominator == 1 and
            Fraction(ratio).numerator == _isqrt_exact(ratio.numerator) ** 2):
        raise ValueError(f"sqrt({d}) does not lie in {K}")
    m = _isqrt_exact(ratio.numerator)
    sqrt_d = (2 * K.gen() + a1) * Fraction(1, m)
    x = K.elem(pt.x / d)
    yprime = K.elem(pt.y / (d * d)) * sqrt_d
    # undo the completed square: y = y' - (a1 x + a3)/2 on the original model
    y = yprime - (K.elem(E.a1) * x + K.elem(E.a3)) * Fraction(1, 2)
    EK = _curve_over_field(E, K)
    out = CurvePoint(x, y)
    if not EK.is_on(out):
        raise ValueError("twist point did not land on the curve")
    return out


def _isqrt_exact(n):
    import math
    return math.isqrt(n)


def k_rational_torsion(E: WeierstrassCurve, K: NumberFieldType):
    """Torsion of E over a quadratic field K: rational torsion together with
    the mapped torsion of the corresponding quadratic twist."""
    pts = [INFINITY]
    EK = _curve_over_field(E, K)
    for pt in rational_torsion(E):
        if pt.is_infinity:
            continue
        pts.append(CurvePoint(K.elem(pt.x), K.elem(pt.y)))
    if K.degree == 2:
        from .arith import squarefree_part
        a0, a1 = K.poly[0], K.poly[1]
        d = squarefree_part(a1 * a1 - 4 * a0)
        Ed = quadratic_twist_curve(E, d)
        for pt in rational_torsion(Ed):
            if pt.is_infinity:
                continue
            mapped = twist_point_to_field(E, K, d, pt)
            if mapped not in pts:
                pts.append(mapped)
    seen = set()
    out = []
    for pt in pts:
        key = pt if pt.is_infinity else (pt.x, pt.y)
        if key not in seen:
            seen.add(key)
            out.append(pt)
    return out


@dataclass
class GeneratorCertificate:
    label: str
    p: int
    holds: bool
    per_prime: list  # dicts with prime data, per-point verdicts, common cusp

    def to_json(self):
        return {
            "label": self.label,
            "p": self.p,
            "holds": self.holds,
            "per_prime": self.per_prime,
        }


def certify_generators(label: str, K: NumberFieldType, gens, p: int,
                       registry=None) -> GeneratorCertificate:
    """Check that every supplied generator and every K-rational torsion point
    reduces to a cusp reduction at each prime of K over p.

    The implemented condition is per-point ("each point congruent to some
    cusp"); whether a single common cusp works is reported alongside without
    being required.
    """
    rec = registry_get(label, registry)
    E = rec.curve
    EK = _curve_over_field(E, K)
    for g in gens:
        if not EK.is_on(g):
            raise ValueError(f"supplied point {g} is not on {label} over {K}")
    test_points = list(gens) + k_rational_torsion(E, K)
    per_prime = []
    all_ok = True
    for P in primes_above(K, p):
        crs = cusp_reduction_set(label, p, P.fdeg, registry)
        verdicts = []
        reductions = []
        for pt in test_points:
            red = reduce_point(EK, pt, P)
            ok = red in crs.points
            reductions.append(red)
            verdicts.append(ok)
            all_ok = all_ok and ok
        common = None
        distinct = {r if r.is_infinity else (r.x, r.y) for r in reductions}
        if len(distinct) == 1:
            common = reductions[0].to_json()
        per_prime.append({
            "prime": repr(P),
            "residue_degree": P.fdeg,
            "points": [pt.to_json() for pt in test_points],
            "reductions": [r.to_json() for r in reductions],
            "cusp_reductions": sorted((r.to_json() for r in crs.points), key=str),
            "all_points_cuspidal": all(verdicts),
            "common_cusp": common,
        })
    return GeneratorCertificate(label, p, all_ok, per_prime)


def genus2_counts(max_p: int, registry=None) -> dict:
    """Point counts of the genus-2 registry model at good primes up to max_p;
    the count at 2 comes from shipped data (flagged)."""
    rec = registry_get("X1_13", registry)
    f = list(rec.hyperelliptic)
    out = {}
    for p in _primes_up_to(max_p):
        if p in rec.point_counts:
            out[p] = {"count": rec.point_counts[p], "source": "shipped",
                      "note": rec.count_note}
            continue
        try:
            out[p] = {"count": hyperelliptic_count(f, p), "source": "computed"}
        except (BadReductionError, ValueError):
            out[p] = {"count": None, "source": "bad reduction"}
    return out
