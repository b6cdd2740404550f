"""Integer-constraint enumeration of admissible transformation profiles.

Every table is regenerated from the invariant calculus. Conclusions that
rest on classification results from the literature are attached as
citation strings on static entries and never derived.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Optional

from .hilbert import (
    Determined,
    Inconsistent,
    Unbounded,
    castelnuovo_pi0,
    ciliberto_theta,
    interpolate_base_hilbert,
    max_points_for_h2,
)
from .invariants import (
    InvariantProfile,
    Rejected,
    blowup_selfintersection,
    chern_from_invariants,
    divisibility_ok,
    double_point_secant_degree,
    fourfold_relations,
    general_profile,
    hypersurface_profile,
    parity_ok,
    tangent_segre,
)

ADMISSIBLE = "Admissible"
EXCLUDED_DIVISIBILITY = "ExcludedDivisibility"
EXCLUDED_PARITY = "ExcludedParity"
EXCLUDED_HILBERT = "ExcludedHilbert"
EXCLUDED_BOUND = "ExcludedBound"
EXCLUDED_STRUCTURE = "ExcludedStructure"

QUADRIC_FIBRATION = "QuadricFibration"
SCROLL_OVER_SURFACE = "ScrollOverSurface"
SCROLL_OVER_CURVE = "ScrollOverCurve"


@dataclass(frozen=True)
class CaseRow:
    profile: InvariantProfile
    status: str = ADMISSIBLE
    reason: Optional[str] = None
    structure: Optional[str] = None

    @property
    def admissible(self) -> bool:
        return self.status == ADMISSIBLE

    def to_dict(self) -> dict:
        d = {"status": self.status, "reason": self.reason, "structure": self.structure}
        d.update(self.profile.to_dict())
        return d


# ---------------------------------------------------------------- Delta = 2

def _hypersurface_filter(d: int, Delta: int, n: int):
    """Profile and status of (d, Delta, n) under the numeric filters, or None
    when the profile is not integral."""
    prof = hypersurface_profile(d, Delta, n)
    if isinstance(prof, Rejected):
        return None
    r, delta = prof.r, prof.delta
    if d % 2 == 1 and Delta % 2 == 1 and delta > 0:
        return prof, EXCLUDED_PARITY, "d and Delta both odd force delta = 0"
    if not divisibility_ok(r, delta):
        return prof, EXCLUDED_DIVISIBILITY, "divisibility theorem"
    if not parity_ok(r, delta):
        return prof, EXCLUDED_PARITY, "r + delta must be even"
    if delta >= 1 and (r + delta) % 2:
        return prof, EXCLUDED_PARITY, "Fano index (r + delta)/2 must be integral"
    if delta >= 1:
        res = interpolate_base_hilbert(n, r, delta)
        if isinstance(res, Inconsistent):
            return prof, EXCLUDED_HILBERT, "Hilbert polynomial conditions are inconsistent"
        if isinstance(res, Determined):
            prof = prof.with_(lam=int(res.poly.coeffs[0]), g=_genus_of(res.poly))
    return prof, ADMISSIBLE, None


def _genus_of(poly) -> int:
    from .hilbert import sectional_genus
    return sectional_genus(poly)


def delta2_even_d_table(d_max: int) -> list[tuple[int, int, int, int, int]]:
    """Rows (d, n, r, r', delta) for even d <= d_max surviving the filters
    with Delta = 2, found by scanning n up to 16 d."""
    rows = []
    for d in range(2, d_max + 1, 2):
        for n in range(3, 16 * d + 1):
            res = _hypersurface_filter(d, 2, n)
            if res is None or res[1] in (EXCLUDED_DIVISIBILITY, EXCLUDED_PARITY):
                continue
            p = res[0]
            rows.append((d, n, p.r, p.r_prime, p.delta))
    return rows


def delta2_clause(d: int, delta: int) -> Optional[str]:
    """Which clause of the Delta = 2 congruence classification (d, delta)
    satisfies: 'i', 'ii', 'iii' or None."""
    if d % 2 == 0:
        return "i" if delta in (0, 1, 3, 7) else None
    if delta % 2 == 0:
        if delta == 0:
            return "ii"
        e = delta // 2 - 1
        return "ii" if (d - 1) % (2 ** e) == 0 and d > 1 else None
    m = delta + 1
    e = (m & -m).bit_length() - 1
    s = m >> e
    shift = s * 2 ** (e - 1) - e - 1
    if shift < 0:
        return "iii" if d >= 1 else None
    return "iii" if d > 1 and (d - 1) % (2 ** shift) == 0 else None


def delta2_d_values(n: int) -> list[tuple[int, bool]]:
    """Values d >= 2 allowed for Delta = 2 at source dimension n, with a flag
    marking those excluded by Hilbert polynomial interpolation."""
    out = []
    m = n - 1  # n = (2d - 1)(delta + 1) + 1
    if m <= 0:
        return out
    for k in range(1, m + 1):
        if m % k:
            continue
        q = m // k
        if q % 2 == 0 or q < 3:
            continue
        d, delta = (q + 1) // 2, k - 1
        if delta2_clause(d, delta) is None:
            continue
        if d % 2 == 0 and delta == 2:
            continue
        p = hypersurface_profile(d, 2, n)
        if isinstance(p, Rejected):
            continue
        excluded = False
        if delta >= 1:
            excluded = isinstance(interpolate_base_hilbert(n, p.r, delta), Inconsistent)
        out.append((d, excluded))
    return sorted(out)


# ---------------------------------------------------------------- xi sequences

def j_of(Delta: int) -> int:
    if Delta % 2:
        return 2
    j = 3
    while Delta % (2 ** j) == 2 % (2 ** j):
        j += 1
    return j


def xi(Delta: int, k: int) -> int:
    j = j_of(Delta)
    return 2 * Delta - 3 + 2 ** j + 2 ** j * k


def xi2(k: int) -> int:
    return 1 + 2 ** k


def xi2_prime(k: int) -> int:
    return 33 + 16 * (k // 15) + 16 * k


def is_xi2_prime(n: int) -> bool:
    return (n - 33) % 16 == 0 and n >= 33 and (n - 273) % 256 != 0


def xi_sequences(Delta: int, k_max: int) -> dict:
    out = {"xi": [xi(Delta, k) for k in range(k_max + 1)] if Delta != 2 else []}
    if Delta == 2:
        out["xi2"] = [xi2(k) for k in range(k_max + 1)]
        out["xi2_prime"] = [xi2_prime(k) for k in range(k_max + 1)]
    return out


def _is_pow2(m: int) -> bool:
    return m > 0 and m & (m - 1) == 0


def is_excluded_n(Delta: int, n: int) -> bool:
    """True when n is provably impossible for a map onto a degree-Delta
    hypersurface by the sequence criteria."""
    if n < 2 * Delta:
        return True
    m = n - 2 * Delta + 3  # = (2d - 1)(delta + 1), odd factor >= 3
    if _is_pow2(m):
        return True
    if Delta == 2:
        return is_xi2_prime(n)
    j = j_of(Delta)
    return m % (2 ** j) == 0


def impossible_values(Delta: int, count: int = 20, start: int = 3) -> list[int]:
    out, n = [], start
    while len(out) < count:
        if is_excluded_n(Delta, n):
            out.append(n)
        n += 1
    return out


# ---------------------------------------------------------------- all cases

# (n, r, delta) triples whose base locus is known to have Picard rank > 1, so
# no coindex of the first species is attached.
_NO_COINDEX = {
    (7, 3, 1): "hyperplane section of P2 x P2 (Picard rank 2)",
}


def all_cases_table(Delta_max: int = 4, d_max: int = 4, n_max: int = 100,
                    include_excluded: bool = False) -> list[CaseRow]:
    """Rows (n, r, delta, c_B) per (Delta, d) in canonical (Delta, d, n) order."""
    low = _low_dimensional_pairs()
    rows = []
    for Delta in range(2, Delta_max + 1):
        for d in range(2, d_max + 1):
            for n in range(3, n_max + 1):
                res = _hypersurface_filter(d, Delta, n)
                if res is None:
                    continue
                prof, status, reason = res
                if status == ADMISSIBLE and prof.delta == 0 and prof.r <= 3:
                    if (prof.r, d, Delta) not in low:
                        status = EXCLUDED_STRUCTURE
                        reason = "absent from the classification of base loci of dimension <= 3"
                if (n, prof.r, prof.delta) in _NO_COINDEX:
                    prof = prof.with_(i_B=None, c_B=None)
                if status == ADMISSIBLE or include_excluded:
                    rows.append(CaseRow(prof, status, reason))
    return rows


def _low_dimensional_pairs() -> set:
    out = set()
    for r, fn in ((1, classify_r1), (2, classify_r2), (3, classify_r3)):
        for row in fn():
            p = row.profile
            if row.admissible and p.a == 1 and p.delta == 0:
                out.add((r, p.d, p.Delta))
    return out


# ---------------------------------------------------------------- helpers

def _hilbert_a(r: int, n: int, eps: int, lam: int, g: int, chi: int = 1) -> Optional[int]:
    """Solve the dimension-r Hilbert relations for the excess a."""
    if r == 1:
        num = n * n - n + 2 * eps - 2 - 2 * lam
    elif r == 2:
        num = n * n - n + 2 * g + 2 * eps - 4 - 4 * lam
    elif r == 3:
        num = 2 * chi - 4 * lam + n * n - 3 * n + 2 * g + 4 * eps - 6
    else:
        raise ValueError("r must be 1, 2 or 3")
    if num % 2:
        return None
    return num // 2


def _delta_from_euler(r: int, n: int, lam: int, g: int, d: int, top: int) -> Fraction:
    """Solve c_r(B) = top for the image degree, using the blow-up identities."""
    c0, _ = chern_from_invariants(r, n, lam, g, d, 0)
    c1, _ = chern_from_invariants(r, n, lam, g, d, 1)
    slope = Fraction(c1.values[-1]) - Fraction(c0.values[-1])
    return (Fraction(top) - Fraction(c0.values[-1])) / slope


def _static_row(r: int, n: int, eps: int, lam: int, g: int, d: int, euler: int,
                structure: str, citation: str, chi: int = 1) -> CaseRow:
    a = _hilbert_a(r, n, eps, lam, g, chi)
    if r == 1:
        _, s = chern_from_invariants(1, n, lam, g, d, 1)
        Delta = Fraction(blowup_selfintersection(n, r, lam, s, 0))
    else:
        Delta = _delta_from_euler(r, n, lam, g, d, euler)
        _, s = chern_from_invariants(r, n, lam, g, d, int(Delta))
        if blowup_selfintersection(n, r, lam, s, 1) != d * Delta:
            raise ArithmeticError(f"inconsistent static data for {structure}")
    gp = general_profile(d, n, r)
    prof = gp.with_(a=a, Delta=int(Delta), lam=lam, g=g, chi=chi)
    return CaseRow(prof, ADMISSIBLE, citation, structure)


def _row(r, n, a, lam, g, d, Delta, chi=None, status=ADMISSIBLE, reason=None, structure=None):
    gp = general_profile(d, n, r) if d is not None else InvariantProfile(n=n, r=r, delta=2 * r + 2 - n)
    prof = gp.with_(a=a, lam=lam, g=g, d=d, Delta=Delta, chi=chi)
    return CaseRow(prof, status, reason, structure)


# ---------------------------------------------------------------- r = 1

def classify_r1() -> list[CaseRow]:
    """Curves: Hilbert relations plus the blow-up identities for n in {3, 4}."""
    rows = []
    for n in (3, 4):
        for eps in (0, 1):
            for a in range(0, n * n):
                lam2 = n * n - n + 2 * eps - 2 * a - 2
                g2 = n * n - 3 * n + 4 * eps - 2 * a - 2
                if lam2 % 2 or g2 % 2 or lam2 < 2 or g2 < 0:
                    continue
                lam, g = lam2 // 2, g2 // 2
                if eps and a < n - 2:
                    # B spans a hyperplane H and must be cut out there by the
                    # a quadrics left after removing H times linear forms.
                    continue
                _, s = chern_from_invariants(1, n, lam, g, 1, 1)
                Delta = blowup_selfintersection(n, 1, lam, s, 0)
                dD = blowup_selfintersection(n, 1, lam, s, 1)
                if Delta <= 0 or dD <= 0 or dD % Delta:
                    continue
                d = dD // Delta
                status, reason, structure = ADMISSIBLE, None, None
                if d == 1 and 2 * 1 + 2 == n and (lam, g) != (3, 0):
                    status = EXCLUDED_STRUCTURE
                    reason = "the only curve with one apparent double point is the twisted cubic"
                rows.append(_row(1, n, a, lam, g, d, Delta, 1 - g, status, reason, structure))
    return sorted(rows, key=lambda c: (c.profile.n, c.profile.a))


# ---------------------------------------------------------------- r = 2

_R2_STATIC = (
    # (n, eps, lam, g, d, e(B), structure, citation)
    (4, 1, 2, 0, 1, 4, "P1 x P1 in P3", "LQEL varieties with delta = r"),
    (5, 1, 3, 0, 1, 4, "hyperplane section of P1 x P2", "LQEL varieties with delta = r - 1"),
    (5, 0, 4, 0, 2, 3, "Veronese surface", "LQEL varieties with delta = r - 1"),
    (6, 1, 4, 0, 1, 4, "rational normal scroll", "OADP surfaces (Ciliberto-Mella-Russo)"),
    (6, 1, 5, 1, 1, 7, "del Pezzo surface of degree 5", "OADP surfaces (Ciliberto-Mella-Russo)"),
)


def _castelnuovo_arg_ok(lam: int, a: int, N: int, n: int) -> bool:
    """min(lam, 2N+1) <= h_Lambda(2) <= C(N+2, 2) - (n + 1 + a)."""
    return min(lam, 2 * N + 1) <= comb(N + 2, 2) - (n + 1 + a)


def r2_candidates() -> list[tuple[int, int, int, int]]:
    """(a, lam, g, chi) for nondegenerate surfaces in P^6."""
    out = []
    n, N = 6, 4
    for a in range(0, 15):
        for lam in range(1, 40):
            g = 2 * lam + a - 13
            chi = lam + a - 7
            if g < 0 or not _castelnuovo_arg_ok(lam, a, N, n):
                continue
            if g == 0 and chi != 1:
                continue  # sectional genus 0 surfaces are rational
            out.append((a, lam, g, chi))
    return out


def r2_double_point(a: int, lam: int, g: int, chi: int, n: int = 6) -> list[tuple[int, int]]:
    """(d, Delta) with d >= 2 satisfying the double point formula and the
    blow-up identity for d Delta."""
    _, s = chern_from_invariants(2, n, lam, g, 1, 1)
    v = blowup_selfintersection(n, 2, lam, s, 1)
    sols = []
    for Delta in range(1, int(v) + 1):
        if v % Delta:
            continue
        d = int(v) // Delta
        c, _ = chern_from_invariants(2, n, lam, g, d, Delta)
        st = tangent_segre(c, lam, {"c1^2": 12 * chi - c.values[1]})
        if double_point_secant_degree(2, lam, st) == 2 * d - 1 and d >= 2:
            sols.append((d, Delta))
    return sols


_R2_STRUCTURE = {
    (0, 7, 1): "elliptic scroll with e = -1",
    (0, 8, 3): "P2 blown up at 8 points, |4H - p1 - ... - p8|",
    (1, 7, 2): "P2 blown up at 6 points, |4H - 2p0 - p1 - ... - p5|",
    (2, 6, 1): "P2 blown up at 3 points, |3H - p1 - p2 - p3|",
    (3, 5, 0): "rational normal scroll",
}


def classify_r2() -> list[CaseRow]:
    rows = [_static_row(2, n, eps, lam, g, d, e, st, cit)
            for (n, eps, lam, g, d, e, st, cit) in _R2_STATIC]
    for a, lam, g, chi in r2_candidates():
        for d, Delta in r2_double_point(a, lam, g, chi):
            rows.append(_row(2, 6, a, lam, g, d, Delta, chi,
                             structure=_R2_STRUCTURE.get((a, lam, g))))
    return _sorted(rows)


def _sorted(rows):
    def key(c):
        p = c.profile
        return (p.n, p.a, p.lam, p.d if p.d is not None else -1, p.Delta or 0)
    return sorted(rows, key=key)


# ---------------------------------------------------------------- r = 3

_R3_STATIC = (
    # (n, eps, lam, g, d, e(B), structure, citation)
    (5, 1, 2, 0, 1, 4, "quadric Q3", "LQEL varieties with delta = r"),
    (6, 1, 3, 0, 1, 6, "P1 x P2", "LQEL varieties with delta = r - 1"),
    (7, 1, 4, 0, 1, 6, "scroll P(O(1)+O(1)+O(2))", "conic-connected varieties"),
    (7, 1, 5, 1, 1, 4, "linear section of G(1,4)", "del Pezzo varieties"),
    (7, 0, 6, 1, 2, 6, "hyperplane section of P2 x P2", "conic-connected varieties"),
    (8, 1, 5, 0, 1, 6, "rational normal scroll", "OADP 3-folds (Ciliberto-Mella-Russo)"),
    (8, 1, 6, 1, 1, 8, "P1 x P1 x P1", "OADP 3-folds (Ciliberto-Mella-Russo)"),
    (8, 1, 7, 2, 1, 4, "Edge variety of degree 7", "OADP 3-folds (Ciliberto-Mella-Russo)"),
    (8, 1, 8, 3, 1, 6, "P_{P2}(E), c1(E) = 4, c2(E) = 8", "OADP 3-folds (Ciliberto-Mella-Russo)"),
)


def r3_chi(a: int, lam: int, g: int) -> int:
    return 2 * lam - g + a - 17


def r3_candidates() -> tuple[list, list]:
    """(a, lam, g) for nondegenerate 3-folds in P^8, and excluded ones.

    Negative K_S.H_S with K_S not trivial gives g = 6 - 5q - a and
    lam = 12 - 3q - a (q the irregularity). The two cases with nonnegative
    K_S.H_S come from the refined Castelnuovo bounds.
    """
    keep, drop = [], []
    for a in range(0, 7):
        for q in (0, 1):
            g, lam = 6 - 5 * q - a, 12 - 3 * q - a
            if g < 0:
                continue
            if q == 1:
                drop.append((a, lam, g, "Fujita: polarized varieties with small invariants"))
            else:
                keep.append((a, lam, g))
    keep += [(0, 13, 8), (1, 12, 7)]
    keep = [c for c in keep if _castelnuovo_arg_ok(c[1], c[0], 5, 8)]
    return sorted(set(keep)), drop


def k3_double_point(a: int, lam: int, g: int, d: int, Delta: int) -> int:
    """K_B^3 forced by the double point formula for a 3-fold in P^8."""
    return lam * lam + 23 * lam - 24 * g - (7 * d + 1) * Delta - 4 * d + 36 * a - 226


def _qf_ok(a, lam, g, d, Delta):
    return (d * Delta == 23 * lam - 16 * g + 12 * a - 180
            and Delta + 4 * d == lam * lam - 130 * lam + 64 * g - 48 * a + 1058)


def scroll_surface_c2(a, lam, g, d) -> Fraction:
    num = ((7 * d - 1) * lam * lam + (177 - 679 * d) * lam + (292 * d - 92) * g
           - 28 * d * d + (5554 - 252 * a) * d + 36 * a - 1474)
    return Fraction(num, 2 * d + 2)


def _sos_ok(a, lam, g, d, Delta):
    return Delta * (d + 1) == lam * lam - 107 * lam + 48 * g - 4 * d - 36 * a + 878


def _soc_ok(a, lam, g, d, Delta):
    return (lam * lam + 23 * lam - 78 * g - (7 * d + 1) * Delta - 4 * d + 36 * a - 172 == 0
            and 22 * lam - 20 * g - d * Delta + 12 * a - 176 == 0)


def _search(pred, d_max=60, D_max=400):
    return [(d, D) for d in range(1, d_max + 1) for D in range(1, D_max + 1) if pred(d, D)]


def structural_constraints_r3(kind: str, a: Optional[int] = None, lam: Optional[int] = None,
                              g: Optional[int] = None, d: Optional[int] = None) -> list[dict]:
    """Integer solutions of the structure equations; [] means Empty.

    With (a, lam, g) omitted the nondegenerate candidates are scanned.
    """
    if kind not in (QUADRIC_FIBRATION, SCROLL_OVER_SURFACE, SCROLL_OVER_CURVE):
        raise ValueError(f"unknown structure {kind!r}")
    cands = [(a, lam, g)] if a is not None else r3_candidates()[0]
    pred = {QUADRIC_FIBRATION: _qf_ok, SCROLL_OVER_SURFACE: _sos_ok,
            SCROLL_OVER_CURVE: _soc_ok}[kind]
    out = []
    for (a_, l_, g_) in cands:
        for d_, D_ in _search(lambda x, y: pred(a_, l_, g_, x, y)):
            if d is not None and d_ != d:
                continue
            sol = {"a": a_, "lambda": l_, "g": g_, "d": d_, "Delta": D_}
            if kind == SCROLL_OVER_SURFACE:
                sol["c2_Y"] = scroll_surface_c2(a_, l_, g_, d_)
            out.append(sol)
    return out


def mukai_double_point(lam: int = 12, g: int = 7, d_max: int = 60,
                       d_min: int = 2, Delta_min: int = 2) -> list[tuple[int, int]]:
    """(d, Delta) with 2(2d-1) equal to the double point value for a prime
    Fano 3-fold (K = -H, c2.H = 24) in P^8.

    The defaults d >= 2 and Delta >= 2 restrict to the nondegenerate regime
    with a hypersurface image; pass 1 to see the degenerate solutions too.
    """
    from .invariants import ClassVector, CHERN

    def excess(d, Delta):
        c, _ = chern_from_invariants(3, 8, lam, g, d, Delta)
        cm = ClassVector(CHERN, 3, (c.values[0], 24, c.values[2]), lam)
        st = tangent_segre(cm, lam, index=1)
        return double_point_secant_degree(3, lam, st) - (2 * d - 1)

    # The excess is affine in Delta for fixed d: solve instead of scanning.
    out = []
    for d in range(d_min, d_max + 1):
        f0, f1 = excess(d, 0), excess(d, 1)
        slope = f1 - f0
        if slope == 0:
            continue
        Delta = Fraction(-f0) / slope
        if Delta.denominator == 1 and Delta >= Delta_min and excess(d, int(Delta)) == 0:
            out.append((d, int(Delta)))
    return out


# Structures available for each nondegenerate candidate (a, lam, g), with the
# literature reference that produces them. Each carries the equation used to
# pin down (d, Delta).
_R3_STRUCTURES = {
    (0, 12, 6): [("scroll over a rational surface with K_Y^2 = 5", SCROLL_OVER_SURFACE, 7,
                  "Crauder-Katz")],
    (0, 13, 8): [("blow-up of a prime Fano 3-fold of genus 8 at a point", "K3", -6,
                  "Crauder-Katz")],
    (1, 11, 5): [("blow-up of Q3 at 5 points", "K3", -14, "classification of cubic images"),
                 ("scroll over P(O + O(-1))", SCROLL_OVER_SURFACE, 4,
                  "classification of cubic images")],
    (1, 12, 7): [("linear section of the spinor variety S10", "K3", -12, "Mukai")],
    (2, 10, 4): [("scroll over Q2", SCROLL_OVER_SURFACE, 4, "Fania-Livorni; Ionescu"),
                 ("quadric fibration over P1", QUADRIC_FIBRATION, None, "Fania-Livorni; Ionescu")],
    (3, 9, 3): [("scroll over P2", SCROLL_OVER_SURFACE, 3, "Fania-Livorni; Ionescu"),
                ("quadric fibration over P1", QUADRIC_FIBRATION, None, "Fania-Livorni; Ionescu")],
    (4, 8, 2): [("hyperplane section of P1 x Q3", QUADRIC_FIBRATION, None, "Ionescu III")],
    (5, 7, 1): [],
    (6, 6, 0): [("rational normal scroll", SCROLL_OVER_CURVE, None, "Ionescu"),
                ("quadric fibration over P1", QUADRIC_FIBRATION, None, "Ionescu")],
}

_R3_EXCLUDED_STRUCTURE = {
    (5, 7, 1): "Ionescu: P3 blown up at a point, whose inverse is not liftable",
}


def _r3_type_ok(a: int, d: int, Delta: int) -> bool:
    cS = 5 - d
    if a == 0:
        return cS == 0 and Delta == 1
    if a == 1:
        return cS == Delta - 1 and Delta >= 2
    return d >= 2


def classify_r3() -> list[CaseRow]:
    rows = [_static_row(3, n, eps, lam, g, d, e, st, cit)
            for (n, eps, lam, g, d, e, st, cit) in _R3_STATIC]
    keep, drop = r3_candidates()
    for a, lam, g, cit in drop:
        rows.append(_row(3, 8, a, lam, g, None, None, r3_chi(a, lam, g),
                         EXCLUDED_STRUCTURE, cit))
    for a, lam, g in keep:
        chi = r3_chi(a, lam, g)
        if (a, lam, g) in _R3_EXCLUDED_STRUCTURE:
            rows.append(_row(3, 8, a, lam, g, None, None, chi, EXCLUDED_STRUCTURE,
                             _R3_EXCLUDED_STRUCTURE[(a, lam, g)]))
            continue
        for label, kind, param, cit in _R3_STRUCTURES[(a, lam, g)]:
            if kind == "K3":
                sols = _search(lambda d, D: k3_double_point(a, lam, g, d, D) == param)
            else:
                sols = [(s["d"], s["Delta"]) for s in structural_constraints_r3(kind, a, lam, g)
                        if kind != SCROLL_OVER_SURFACE or s["c2_Y"] == param]
            sols = [s for s in sols if _r3_type_ok(a, *s)]
            if not sols:
                rows.append(_row(3, 8, a, lam, g, None, None, chi, EXCLUDED_BOUND,
                                 f"{kind}: no integer solution", label))
            for d, Delta in sols:
                if label == "quadric fibration over P1" and a == 6:
                    rows.append(_row(3, 8, a, lam, g, d, Delta, chi, EXCLUDED_STRUCTURE,
                                     "Ionescu: B is a rational normal scroll", label))
                else:
                    rows.append(_row(3, 8, a, lam, g, d, Delta, chi, reason=cit, structure=label))
    return _sorted(rows)


# ---------------------------------------------------------------- r = 4

def r4_hilbert_values(a: int, lam, g, chi) -> dict:
    """P_B(-1), P_B(-2), P_B(-3) for a 4-fold in P^10 with P(1) = 11, P(2) = 55 - a."""
    from .hilbert import binom

    def P(t):
        return (lam * binom(t, 4) + (3 * lam + 1 - g) * binom(t, 3)
                + (chi - a + 33) * binom(t, 2) + (11 - chi) * t + chi)
    return {t: P(-t) for t in (1, 2, 3)}


def r4_h_min(lam: int, N: int = 6) -> int:
    """Least h_Lambda(2) compatible with lam points in uniform position."""
    h = N + 1
    while True:
        cap = max_points_for_h2(N, h)
        if cap is Unbounded or cap >= lam:
            return h
        h += 1


def r4_lambda_max(a: int, N: int = 6):
    h2 = 17 - a
    return max_points_for_h2(N, h2)


def r4_genus_cap(lam: int, N: int = 6) -> int:
    theta = r4_h_min(lam, N) - (2 * N + 1)
    if theta >= 1:
        return ciliberto_theta(lam, N, theta)
    return castelnuovo_pi0(lam, N)


@dataclass(frozen=True)
class R4Case:
    a: int
    lambda_min: int
    lambda_max: Optional[int]
    g: Optional[int]
    g_max: Optional[int]
    chi: Optional[int]
    chi_formula: Optional[str]
    points: tuple = ()
    status: str = ADMISSIBLE
    reason: Optional[str] = None
    genus_caps: tuple = ()

    def to_dict(self) -> dict:
        return {"a": self.a, "lambda_min": self.lambda_min, "lambda_max": self.lambda_max,
                "g": self.g, "g_max": self.g_max, "chi": self.chi,
                "chi_formula": self.chi_formula, "status": self.status, "reason": self.reason,
                "genus_caps": {str(l): c for l, c in self.genus_caps}}


def _r4_points(a: int, lam_hi: int):
    """All (lam, g, chi) satisfying the vanishing logic, split into kept and
    excluded. Each kept point records whether g is pinned by two conditions."""
    good, bad = [], []
    for lam in range(7, lam_hi + 1):
        gcap = r4_genus_cap(lam)
        # the sign conditions use the largest K.H^3 allowed at this degree
        kh3 = 2 * gcap - 2 - 3 * lam
        forced = [t for t in (1, 2, 3) if kh3 < -t * lam]
        tied = [t for t in (1, 2, 3) if kh3 == -t * lam]
        # at a tie, either P(-t) = 0 or K ~ -tH
        branches = [(forced + tied, None)] + [(forced, t) for t in tied]
        for g in range(0, gcap + 1):
            for need, fano in branches:
                for chi in _r4_chi_solutions(a, lam, g, need, fano):
                    reason = _r4_exclusion(a, lam, g, chi, fano)
                    pinned = fano is not None or len(need) >= 2
                    if reason:
                        bad.append(((lam, g, chi), reason))
                    else:
                        good.append(((lam, g, chi), pinned))
    return _uniq(good), _uniq(bad)


def _uniq(items):
    seen, out = set(), []
    for it in items:
        if it[0] not in seen:
            seen.add(it[0])
            out.append(it)
    return out


def _r4_chi_solutions(a, lam, g, need, fano):
    if fano is not None:
        # K ~ -tH: a Fano variety with h^i(O) = 0 for i > 0, so chi = 1.
        if 2 * g - 2 != (4 - 1 - fano) * lam:
            return []
        vals = r4_hilbert_values(a, lam, g, 1)
        return [1] if all(vals[t] == 0 for t in need) else []
    if not need:
        return []
    v0 = r4_hilbert_values(a, lam, g, 0)
    v1 = r4_hilbert_values(a, lam, g, 1)
    t0 = need[0]
    slope = v1[t0] - v0[t0]
    chi = -Fraction(v0[t0]) / slope
    if chi.denominator != 1:
        return []
    vals = r4_hilbert_values(a, lam, g, int(chi))
    return [int(chi)] if all(vals[t] == 0 for t in need) else []


def _r4_exclusion(a, lam, g, chi, fano) -> Optional[str]:
    if fano == 3:
        return "no del Pezzo 4-fold of degree 8 (classification of del Pezzo varieties)"
    if g == 0 and chi != 1:
        return "sectional genus 0 forces a rational variety"
    if a == 8:
        return "Fania-Livorni: degree nine 4-folds"
    if a == 0 and (lam, g, chi) == (11, 1, 0):
        # elliptic scroll: c4 = 0, type (2, 6) onto P^10
        rhs, _ = fourfold_relations(lam, g, 6, 1)
        if Fraction(rhs, 37).denominator != 1:
            return f"elliptic scroll: c2.H^2 = {rhs}/37 is not an integer"
    return None


def classify_r4(a: int, assume_egh: bool = False) -> list[R4Case]:
    """Numeric cases for a nondegenerate 4-fold base locus in P^10.

    Points (lam, g, chi) come from the quadric-count cap on lam, the
    refined genus bounds and the vanishing of P_B(-t) forced by the sign of
    K.H^3. Degrees with several admissible genera are summarized as a range.
    """
    if not 0 <= a <= 10:
        raise ValueError("a must lie in [0, 10]")
    cap = r4_lambda_max(a)
    open_ended = cap is Unbounded
    good, bad = _r4_points(a, 24 if open_ended else cap)
    out = [R4Case(a, p[0], p[0], p[1], p[1], p[2], None, (p,), EXCLUDED_STRUCTURE, r)
           for p, r in bad]
    pts = sorted(p for p, _ in good)
    if not pts:
        return out
    per_lam = {}
    for p in pts:
        per_lam.setdefault(p[0], []).append(p)
    if open_ended:
        lo = min(per_lam)
        if assume_egh:
            caps = _caps(lo, 24)
            out.append(R4Case(a, lo, 24, None, max(c for _, c in caps), None,
                              _chi_formula(a), tuple(pts), reason="conditional on EGH",
                              genus_caps=caps))
        else:
            out.append(R4Case(a, lo, None, None, None, None, _chi_formula(a), ()))
        return out
    if all(pinned for _, pinned in good):
        out.extend(R4Case(a, p[0], p[0], p[1], p[1], p[2], None, (p,)) for p in pts)
        return out
    lo, hi = min(per_lam), max(per_lam)
    caps = _caps(lo, hi)
    out.append(R4Case(a, lo, hi, None, max(c for _, c in caps), None,
                      _chi_formula(a), tuple(pts), genus_caps=caps))
    return out


def _caps(lo: int, hi: int) -> tuple:
    """Per-degree genus caps over a range row, with g = 1 - lam mod 3 implied."""
    return tuple((lam, r4_genus_cap(lam)) for lam in range(lo, hi + 1))


def _chi_formula(a: int) -> str:
    return f"(-g+2*lambda-{21 - a})/3"


def classify_r4_all(assume_egh: bool = False) -> list[R4Case]:
    out = []
    for a in range(10, -1, -1):
        out.extend(classify_r4(a, assume_egh))
    return out
