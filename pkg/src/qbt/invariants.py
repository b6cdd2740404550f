"""Numerical invariant calculus for special quadratic birational maps.

Segre classes of the normal bundle are obtained from Chern classes of the
base locus through the tangent/normal exact sequence, and intersection
numbers on the blow-up along the base locus come from a single generic
table of the products H^j E^(n-j).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from math import comb, gcd
from typing import Optional, Sequence

from .exactmath import ExactMatrix, UniqueSolution, solve_linear

CHERN = "ChernOfBase"
SEGRE_NORMAL = "SegreOfNormal"
SEGRE_TANGENT = "SegreOfTangent"
_KINDS = (CHERN, SEGRE_NORMAL, SEGRE_TANGENT)


@dataclass(frozen=True)
class InvariantProfile:
    """Integer invariants of a candidate transformation. ``None`` means Unknown."""

    n: Optional[int] = None
    a: Optional[int] = None
    d: Optional[int] = None
    Delta: Optional[int] = None
    r: Optional[int] = None
    delta: Optional[int] = None
    r_prime: Optional[int] = None
    lam: Optional[int] = None
    g: Optional[int] = None
    chi: Optional[int] = None
    i_B: Optional[int] = None
    c_B: Optional[int] = None
    c_S: Optional[int] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    def with_(self, **kw) -> "InvariantProfile":
        return replace(self, **kw)


@dataclass(frozen=True)
class Rejected:
    reason: str


@dataclass(frozen=True)
class ClassVector:
    """Degrees x_j . H^(r-j) for j = 1..r, with companion degree lam."""

    kind: str
    r: int
    values: tuple
    lam: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown class kind {self.kind!r}")
        if len(self.values) != self.r:
            raise ValueError("values length must equal r")
        object.__setattr__(self, "values", tuple(_exact(v) for v in self.values))

    def full(self) -> tuple:
        """(x_0 = lam, x_1, ..., x_r)."""
        return (_exact(self.lam),) + self.values


def _exact(v):
    v = Fraction(v)
    return int(v) if v.denominator == 1 else v


def _ratio(num: int, den: int) -> Optional[int]:
    if den == 0 or num % den:
        return None
    return num // den


def hypersurface_profile(d: int, Delta: int, n: int):
    """Profile of a map of type (2, d) onto a hypersurface of degree Delta."""
    if d < 1 or Delta < 1 or n < 3:
        raise ValueError("need d >= 1, Delta >= 1, n >= 3")
    den = 2 * d - 1
    r = _ratio(d * n - Delta - 3 * d + 3, den)
    if r is None:
        return Rejected("non-integral r")
    delta = _ratio(n - 2 * Delta - 2 * d + 4, den)
    if delta is None:
        return Rejected("non-integral delta")
    if delta < 0:
        return Rejected("negative delta")
    rp = _ratio(2 * (d * n - n + Delta - d - 1), den)
    if rp is None:
        return Rejected("non-integral r'")
    i_B = c_B = None
    if delta > 0 and (r + delta) % 2 == 0:
        i_B = (r + delta) // 2
        c_B = r + 1 - i_B
    return InvariantProfile(n=n, a=1, d=d, Delta=Delta, r=r, delta=delta, r_prime=rp,
                            i_B=i_B, c_B=c_B, c_S=Delta - 1)


def general_profile(d: int, n: int, r: int) -> InvariantProfile:
    """Partial profile from (d, n, r) without assuming a hypersurface image."""
    if d < 1 or r < 1:
        raise ValueError("need d >= 1 and r >= 1")
    if n > 2 * r + 2:
        raise ValueError("n > 2r + 2 gives a negative secant defect")
    delta = 2 * r + 2 - n
    i_B = c_B = None
    if delta > 0 and (r + delta) % 2 == 0:
        i_B = (r + delta) // 2
        c_B = r + 1 - i_B
    return InvariantProfile(n=n, d=d, r=r, delta=delta, r_prime=2 * n - 2 * r - 4,
                            i_B=i_B, c_B=c_B, c_S=(1 - 2 * d) * r + d * n - 3 * d + 2)


def secant_degree(d: int) -> int:
    """Degree of the secant hypersurface of the base locus."""
    return 2 * d - 1


def divisibility_ok(r: int, delta: int) -> bool:
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta < 3:
        return True
    return (r - delta) % (2 ** ((delta - 1) // 2)) == 0


def parity_ok(r: int, delta: int) -> bool:
    return delta < 2 or (r + delta) % 2 == 0


def c1_from_genus(r: int, lam: int, g: int) -> int:
    """-K.H^(r-1) from adjunction on the curve section."""
    return (r - 1) * lam - 2 * g + 2


def chern_to_normal_segre(n: int, lam: int, c: ClassVector) -> ClassVector:
    """Segre classes of the normal bundle: s(N) = c(T_B) (1+H)^-(n+1)."""
    if c.kind != CHERN:
        raise ValueError("expected a ChernOfBase vector")
    full = (lam,) + c.values
    vals = []
    for k in range(1, c.r + 1):
        vals.append(sum((-1) ** (k - j) * comb(n + k - j, k - j) * full[j] for j in range(k + 1)))
    return ClassVector(SEGRE_NORMAL, c.r, tuple(vals), lam)


def intersection_HE(n: int, r: int, j: int, s_full: Sequence) -> object:
    """H^j . E^(n-j) on the blow-up of P^n along an r-dimensional base locus."""
    if j == n:
        return 1
    if r + 1 <= j <= n - 1:
        return 0
    return (-1) ** (n - j - 1) * s_full[r - j]


def blowup_selfintersection(n: int, r: int, lam: int, sN: ClassVector, h_power: int):
    """(2H - E)^(n - h) . H^h on the blow-up."""
    if not 0 <= h_power <= n:
        raise ValueError("h_power must lie in [0, n]")
    s_full = (lam,) + tuple(sN.values)
    m = n - h_power
    total = 0
    for i in range(m + 1):
        total += comb(m, i) * 2 ** i * (-1) ** (m - i) * intersection_HE(n, r, i + h_power, s_full)
    return _exact(total)


def _segre_from_unknowns(n, r, lam, c1, unknowns):
    c = ClassVector(CHERN, r, (c1,) + tuple(unknowns), lam)
    return c, chern_to_normal_segre(n, lam, c)


def chern_from_invariants(r: int, n: int, lam: int, g: int, d: int, Delta: int):
    """Chern and normal Segre degrees of the base locus from (lam, g, d, Delta).

    c_1 comes from adjunction; c_2..c_r are solved from the blow-up identities
    Delta = (2H-E)^n and d Delta = (2H-E)^(n-1) H (the first for r = 2, both
    for r = 3). Remaining identities become constraints, see
    ``invariant_residuals``.
    """
    if r not in (1, 2, 3):
        raise ValueError("closed forms are available for r in {1, 2, 3}")
    c1 = c1_from_genus(r, lam, g)
    k = r - 1
    if k == 0:
        return _segre_from_unknowns(n, r, lam, c1, ())
    targets = [Delta, d * Delta][:k]
    hs = [0, 1][:k]
    base = [blowup_selfintersection(n, r, lam, _segre_from_unknowns(n, r, lam, c1, [0] * k)[1], h)
            for h in hs]
    rows = []
    for h_idx, h in enumerate(hs):
        row = []
        for u in range(k):
            e = [0] * k
            e[u] = 1
            val = blowup_selfintersection(n, r, lam, _segre_from_unknowns(n, r, lam, c1, e)[1], h)
            row.append(Fraction(val) - Fraction(base[h_idx]))
        rows.append(row)
    rhs = [Fraction(t) - Fraction(b) for t, b in zip(targets, base)]
    sol = solve_linear(ExactMatrix.from_rows(rows), rhs)
    if not isinstance(sol, UniqueSolution):
        raise ArithmeticError("blow-up identities do not determine the Chern classes")
    return _segre_from_unknowns(n, r, lam, c1, [_exact(v) for v in sol.values])


def invariant_residuals(r: int, n: int, lam: int, g: int, d: int, Delta: int) -> dict:
    """Blow-up identities not used to solve for Chern classes, as
    (computed - expected); all zero for a consistent profile."""
    c, s = chern_from_invariants(r, n, lam, g, d, Delta)
    out = {}
    if r <= 1:
        out["Delta"] = blowup_selfintersection(n, r, lam, s, 0) - Delta
    if r <= 2:
        out["dDelta"] = blowup_selfintersection(n, r, lam, s, 1) - d * Delta
    return out


def tangent_segre(c: ClassVector, lam, products: Optional[dict] = None,
                  index=None) -> ClassVector:
    """Segre classes of the tangent bundle, the formal inverse of c(T_B).

    Mixed products are degrees against H powers, keyed ``"c1^2"`` (c_1^2.H^(r-2)),
    ``"c1^3"``, ``"c1c2"``, ``"c1^4"``, ``"c1^2c2"``, ``"c2^2"``, ``"c1c3"``.
    With ``index=k`` (c_1 = kH numerically) they are derived from c.
    """
    if c.kind != CHERN:
        raise ValueError("expected a ChernOfBase vector")
    r = c.r
    if r > 4:
        raise ValueError("tangent Segre classes are supported for r <= 4")
    cv = list(c.values) + [0] * (4 - r)
    c1, c2, c3, c4 = cv
    pr = dict(products or {})
    if index is not None:
        k = Fraction(index)
        pr.setdefault("c1^2", k * k * lam if r >= 2 else None)
        pr.setdefault("c1^3", k ** 3 * lam if r >= 3 else None)
        pr.setdefault("c1c2", k * c2 if r >= 3 else None)
        pr.setdefault("c1^4", k ** 4 * lam if r >= 4 else None)
        pr.setdefault("c1^2c2", k * k * c2 if r >= 4 else None)
        pr.setdefault("c1c3", k * c3 if r >= 4 else None)

    def need(key):
        if pr.get(key) is None:
            raise ValueError(f"mixed product {key} is required")
        return Fraction(pr[key])

    vals = [-Fraction(c1)]
    if r >= 2:
        vals.append(need("c1^2") - c2)
    if r >= 3:
        vals.append(-need("c1^3") + 2 * need("c1c2") - c3)
    if r >= 4:
        vals.append(need("c1^4") - 3 * need("c1^2c2") + need("c2^2") + 2 * need("c1c3") - c4)
    return ClassVector(SEGRE_TANGENT, r, tuple(vals), lam)


def double_point_secant_degree(r: int, lam, sT: ClassVector, delta: int = 0,
                               formal: bool = False) -> Fraction:
    """(lam^2 - sum_j C(2r+1, j) s_(r-j)(T).H^j) / 2, the secant degree when
    delta = 0. Positive defect is refused unless ``formal`` is set."""
    if sT.kind != SEGRE_TANGENT:
        raise ValueError("expected a SegreOfTangent vector")
    if delta != 0 and not formal:
        raise ValueError("the double point formula applies to delta = 0")
    full = (lam,) + tuple(sT.values)
    total = Fraction(lam) ** 2
    for j in range(r + 1):
        total -= comb(2 * r + 1, j) * Fraction(full[r - j])
    return total / 2


@dataclass(frozen=True)
class Consistent:
    dDelta: int
    Delta: int
    d: int


@dataclass(frozen=True)
class NotLiftable:
    dDelta: object
    degree_product: object


def liftability_witness(lam: int, sN: ClassVector, n: int = 8, r: int = 3):
    """Test the liftable-inverse identity for a birational map P^8 -> image.

    v = (2H-E)^7.H must equal d.deg(image), with deg(image) = (2H-E)^8.
    """
    if n != 8 or r != 3:
        raise ValueError("liftability witness is defined for n = 8, r = 3")
    v = blowup_selfintersection(n, r, lam, sN, 1)
    w = blowup_selfintersection(n, r, lam, sN, 0)
    if v <= 0 or w <= 0 or Fraction(v) % Fraction(w) != 0:
        return NotLiftable(v, w)
    return Consistent(int(v), int(w), int(Fraction(v) / Fraction(w)))


def degree_product_candidates(v: int, w: int) -> list[tuple[int, int, int]]:
    """(d, Delta, deg psi) with d Delta = v and deg psi . Delta = w."""
    out = []
    if v <= 0 or w <= 0:
        return out
    for D in range(1, gcd(v, w) + 1):
        if v % D == 0 and w % D == 0:
            out.append((v // D, D, w // D))
    return out


def fourfold_relations(lam: int, g: int, d: int, Delta: int) -> tuple[int, int]:
    """Right-hand sides of the two 37-weighted relations for a 4-fold in P^10:
    37 c2.H^2 - c4 and 37 c3.H + 7 c4."""
    return (-231 * lam + 188 * g + (1 - 9 * d) * Delta + 3396,
            655 * lam - 428 * g + (26 * d - 7) * Delta - 5716)


def line_count_bound(lam: int, d: int) -> int:
    """Largest k allowed by lam - 8 + k <= d."""
    return d - lam + 8
