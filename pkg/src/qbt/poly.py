"""Sparse multivariate polynomials, rational maps between projective spaces,
and Hilbert functions of homogeneous ideals via Macaulay matrices.

Coefficients are ``Fraction`` over Q or ints in ``[0, p)`` over GF(p).
Monomials are ordered by graded reverse lexicographic order with
``x0 > x1 > ...``; printing and matrix column order follow it.

Polynomial grammar (whitespace ignored)::

    poly  := ['+'|'-'] term (('+'|'-') term)*
    term  := coeff ['*' power ('*' power)*] | power ('*' power)*
    coeff := INT ['/' INT]
    power := PREFIX INT ['^' INT]
"""

from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .exactmath import (
    ExactMatrix,
    bareiss_rank,
    check_modulus,
    default_prime,
    gated_rank,
    nullspace,
    rank_mod_p_array,
)
from .hilbert import IntegerValuedPoly, fit_binomial

MAX_COLUMNS = 500_000
MAX_RESAMPLES = 32
COORD_RANGE = 10


class PolySyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


class ResamplingExhausted(RuntimeError):
    pass


def grevlex_key(e: Sequence[int]) -> tuple:
    """Sort key; larger key means larger monomial."""
    return (sum(e), tuple(-x for x in reversed(e)))


def _norm_coeff(c, modulus):
    if modulus is None:
        return Fraction(c)
    if isinstance(c, Fraction):
        return c.numerator * pow(c.denominator, -1, modulus) % modulus
    return int(c) % modulus


@dataclass(frozen=True)
class MultiPoly:
    """Sparse polynomial; ``terms`` is sorted by decreasing grevlex order."""

    nvars: int
    terms: tuple = ()
    modulus: Optional[int] = None

    @classmethod
    def from_dict(cls, nvars: int, d: dict, modulus: Optional[int] = None) -> "MultiPoly":
        acc: dict = {}
        for e, c in d.items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars or min(e, default=0) < 0:
                raise ValueError(f"bad exponent vector {e}")
            acc[e] = _norm_coeff(acc.get(e, 0), modulus) + _norm_coeff(c, modulus)
            if modulus is not None:
                acc[e] %= modulus
        items = [(e, c) for e, c in acc.items() if c != 0]
        items.sort(key=lambda t: grevlex_key(t[0]), reverse=True)
        return cls(nvars, tuple(items), modulus)

    @classmethod
    def zero(cls, nvars: int, modulus: Optional[int] = None) -> "MultiPoly":
        return cls(nvars, (), modulus)

    @classmethod
    def constant(cls, nvars: int, c, modulus: Optional[int] = None) -> "MultiPoly":
        return cls.from_dict(nvars, {(0,) * nvars: c}, modulus)

    @classmethod
    def var(cls, nvars: int, i: int, modulus: Optional[int] = None) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls.from_dict(nvars, {tuple(e): 1}, modulus)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=-1)

    @property
    def is_homogeneous(self) -> bool:
        return len({sum(e) for e, _ in self.terms}) <= 1

    def _check(self, other: "MultiPoly"):
        if self.nvars != other.nvars or self.modulus != other.modulus:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        d = self.as_dict()
        for e, c in other.terms:
            d[e] = d.get(e, 0) + c
        return MultiPoly.from_dict(self.nvars, d, self.modulus)

    def __neg__(self) -> "MultiPoly":
        return self.scale(-1)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def scale(self, c) -> "MultiPoly":
        return MultiPoly.from_dict(self.nvars, {e: v * c for e, v in self.terms}, self.modulus)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        d: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d.get(e, 0) + c1 * c2
        return MultiPoly.from_dict(self.nvars, d, self.modulus)

    def __pow__(self, k: int) -> "MultiPoly":
        out = MultiPoly.constant(self.nvars, 1, self.modulus)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derivative(self, i: int) -> "MultiPoly":
        d = {}
        for e, c in self.terms:
            if e[i]:
                f = list(e)
                f[i] -= 1
                d[tuple(f)] = c * e[i]
        return MultiPoly.from_dict(self.nvars, d, self.modulus)

    def reduce(self, p: int) -> "MultiPoly":
        """Image in GF(p)[x]; raises if a denominator vanishes mod p."""
        return MultiPoly.from_dict(self.nvars, dict(self.terms), check_modulus(p))

    def evaluate(self, point: Sequence, modulus: Optional[int] = None):
        """Exact value at ``point``; ``modulus`` evaluates over GF(p)."""
        if len(point) != self.nvars:
            raise ValueError("point has the wrong length")
        p = modulus if modulus is not None else self.modulus
        if p is None:
            xs = [Fraction(x) for x in point]
            total = Fraction(0)
            for e, c in self.terms:
                v = c
                for x, k in zip(xs, e):
                    if k:
                        v *= x ** k
                total += v
            return total
        xs = [_norm_coeff(x, p) for x in point]
        total = 0
        for e, c in self.terms:
            v = _norm_coeff(c, p)
            for x, k in zip(xs, e):
                if k:
                    v = v * pow(x, k, p) % p
            total = (total + v) % p
        return total

    def substitute(self, polys: Sequence["MultiPoly"]) -> "MultiPoly":
        """Composition self(polys[0], ..., polys[nvars-1])."""
        if len(polys) != self.nvars:
            raise ValueError("need one polynomial per variable")
        m = polys[0].nvars
        powers: dict = {}

        def pw(i, k):
            if (i, k) not in powers:
                powers[(i, k)] = polys[i] ** k
            return powers[(i, k)]

        out = MultiPoly.zero(m, polys[0].modulus)
        for e, c in self.terms:
            t = MultiPoly.constant(m, c, polys[0].modulus)
            for i, k in enumerate(e):
                if k:
                    t = t * pw(i, k)
            out = out + t
        return out

    def to_str(self, prefix: str = "x") -> str:
        return format_poly(self, prefix)

    def __str__(self) -> str:
        return self.to_str()


# parsing and printing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]+)|(\S))")


def _tokenize(text: str):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1) is not None:
            out.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), start))
        elif m.group(3) is not None:
            out.append(("sym", m.group(3), start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


def parse_poly(text: str, nvars: int, variable_prefix: str = "x",
               modulus: Optional[int] = None) -> MultiPoly:
    """Parse ``text`` in the documented grammar into a canonical MultiPoly."""
    toks = _tokenize(text)
    i = 0

    def peek():
        return toks[i]

    def take(kind, value=None):
        nonlocal i
        t = toks[i]
        if t[0] != kind or (value is not None and t[1] != value):
            want = value if value is not None else kind
            raise PolySyntaxError(f"expected {want!r}", t[2])
        i += 1
        return t

    def power(exps):
        name = take("name")
        if name[1] != variable_prefix:
            raise PolySyntaxError(f"unknown variable prefix {name[1]!r}", name[2])
        idx = take("int")
        if idx[1] >= nvars:
            raise PolySyntaxError(f"variable index {idx[1]} >= {nvars}", idx[2])
        k = 1
        if peek()[:2] == ("sym", "^"):
            take("sym", "^")
            k = take("int")[1]
        exps[idx[1]] += k

    def term(sign):
        coeff = Fraction(sign)
        exps = [0] * nvars
        if peek()[0] == "int":
            num = take("int")[1]
            den = 1
            if peek()[:2] == ("sym", "/"):
                take("sym", "/")
                den = take("int")
                if den[1] == 0:
                    raise PolySyntaxError("zero denominator", den[2])
                den = den[1]
            coeff *= Fraction(num, den)
            if peek()[:2] != ("sym", "*"):
                return tuple(exps), coeff
            take("sym", "*")
        power(exps)
        while peek()[:2] == ("sym", "*"):
            take("sym", "*")
            power(exps)
        return tuple(exps), coeff

    if peek()[0] == "end":
        raise PolySyntaxError("empty polynomial", 0)
    acc: dict = {}
    sign = 1
    if peek()[0] == "sym" and peek()[1] in "+-":
        sign = -1 if take("sym")[1] == "-" else 1
    while True:
        e, c = term(sign)
        acc[e] = acc.get(e, 0) + c
        t = peek()
        if t[0] == "end":
            break
        if t[0] == "sym" and t[1] in "+-":
            i += 1
            sign = -1 if t[1] == "-" else 1
            continue
        raise PolySyntaxError(f"unexpected {t[1]!r}", t[2])
    return MultiPoly.from_dict(nvars, acc, modulus)


def format_poly(p: MultiPoly, prefix: str = "x") -> str:
    """Canonical text form, parseable by ``parse_poly``."""
    if p.is_zero():
        return "0"
    parts = []
    for e, c in p.terms:
        mono = "*".join(f"{prefix}{i}" + (f"^{k}" if k > 1 else "")
                        for i, k in enumerate(e) if k)
        neg = p.modulus is None and c < 0
        a = -c if neg else c
        if mono and a == 1:
            body = mono
        elif mono:
            body = f"{a}*{mono}"
        else:
            body = str(a)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


# points and maps

@dataclass(frozen=True)
class ProjPoint:
    coords: tuple
    modulus: Optional[int] = None

    def __post_init__(self):
        if self.modulus is None:
            cs = tuple(Fraction(c) for c in self.coords)
        else:
            cs = tuple(_norm_coeff(c, self.modulus) for c in self.coords)
        if not any(cs):
            raise ValueError("the zero vector is not a projective point")
        object.__setattr__(self, "coords", cs)

    def __len__(self):
        return len(self.coords)

    def normalized(self) -> "ProjPoint":
        """Primitive integer representative (Q) or first nonzero entry 1 (GF(p))."""
        if self.modulus is not None:
            lead = next(c for c in self.coords if c)
            inv = pow(lead, -1, self.modulus)
            return ProjPoint(tuple(c * inv for c in self.coords), self.modulus)
        den = math.lcm(*(c.denominator for c in self.coords))
        ints = [int(c * den) for c in self.coords]
        g = math.gcd(*ints)
        if next(x for x in ints if x) < 0:
            g = -g
        return ProjPoint(tuple(x // g for x in ints))


@dataclass(frozen=True)
class InBaseLocus:
    point: Optional[ProjPoint] = None


def proj_equal(p: ProjPoint, q: ProjPoint) -> bool:
    """True iff all 2x2 minors of the pair vanish."""
    if len(p) != len(q):
        raise ValueError("points of different lengths")
    a, b = p.coords, q.coords
    m = p.modulus
    i = next(k for k, x in enumerate(a) if x)
    for j in range(len(a)):
        d = a[i] * b[j] - a[j] * b[i]
        if (d % m if m else d) != 0:
            return False
    return any(b)


@dataclass(frozen=True)
class RationalMap:
    """P^n --> P^N given by N+1 forms of a common degree."""

    forms: tuple
    inverse_forms: Optional[tuple] = None
    image_equations: Optional[tuple] = None

    def __post_init__(self):
        forms = tuple(self.forms)
        if not forms:
            raise ValueError("a rational map needs at least one form")
        nv = forms[0].nvars
        degs = {f.degree for f in forms if not f.is_zero()}
        if not degs:
            raise ValueError("all forms are identically zero")
        if len(degs) != 1 or not all(f.is_homogeneous for f in forms):
            raise ValueError("forms must be homogeneous of one degree")
        if any(f.nvars != nv for f in forms):
            raise ValueError("forms in different numbers of variables")
        object.__setattr__(self, "forms", forms)
        N1 = len(forms)
        if self.inverse_forms is not None:
            inv = tuple(self.inverse_forms)
            if len(inv) != nv or any(g.nvars != N1 for g in inv):
                raise ValueError("inverse forms do not match the map's dimensions")
            if not all(g.is_homogeneous for g in inv):
                raise ValueError("inverse forms must be homogeneous")
            object.__setattr__(self, "inverse_forms", inv)
        if self.image_equations is not None:
            eqs = tuple(self.image_equations)
            if any(g.nvars != N1 for g in eqs):
                raise ValueError("image equations live in the wrong ring")
            object.__setattr__(self, "image_equations", eqs)

    @property
    def source_dim(self) -> int:
        return self.forms[0].nvars - 1

    @property
    def target_dim(self) -> int:
        return len(self.forms) - 1

    @property
    def form_degree(self) -> int:
        return next(f.degree for f in self.forms if not f.is_zero())

    def inverse(self) -> "RationalMap":
        if self.inverse_forms is None:
            raise ValueError("no inverse forms")
        return RationalMap(self.inverse_forms)


def eval_forms(forms: Sequence[MultiPoly], p: ProjPoint):
    vals = tuple(f.evaluate(p.coords, p.modulus) for f in forms)
    if not any(vals):
        return InBaseLocus(p)
    return ProjPoint(vals, p.modulus).normalized()


def eval_map(m: RationalMap, p: ProjPoint):
    """phi(p), or InBaseLocus when every form vanishes at p."""
    if len(p) != m.source_dim + 1:
        raise ValueError("point does not lie in the source space")
    return eval_forms(m.forms, p)


def compose(outer: Sequence[MultiPoly], inner: Sequence[MultiPoly]) -> tuple:
    """Forms of outer o inner."""
    return tuple(f.substitute(list(inner)) for f in outer)


def jacobian_rank(m: RationalMap, p: ProjPoint) -> int:
    """Exact rank of (dF_i/dx_j)(p); the fiber dimension is n+1 minus it."""
    n1 = m.source_dim + 1
    rows = [[f.derivative(j).evaluate(p.coords, p.modulus) for j in range(n1)] for f in m.forms]
    if p.modulus is not None:
        return rank_mod_p_array(np.array(rows, dtype=np.int64), p.modulus)
    ints = []
    for r in rows:
        den = math.lcm(*(Fraction(x).denominator for x in r))
        ints.append([int(Fraction(x) * den) for x in r])
    return gated_rank(ints)


def random_point(rng: random.Random, nvars: int) -> ProjPoint:
    """Coordinates uniform in [-10, 10], never the zero vector."""
    while True:
        c = [rng.randint(-COORD_RANGE, COORD_RANGE) for _ in range(nvars)]
        if any(c):
            return ProjPoint(tuple(c))


def sample_outside_base(forms: Sequence[MultiPoly], rng: random.Random):
    """A random point p with its image under ``forms``, resampling when p is
    in the base locus."""
    nv = forms[0].nvars
    for _ in range(MAX_RESAMPLES):
        p = random_point(rng, nv)
        q = eval_forms(forms, p)
        if not isinstance(q, InBaseLocus):
            return p, q
    raise ResamplingExhausted(f"{MAX_RESAMPLES} samples all fell in the base locus")


# Hilbert functions

def monomials(nvars: int, deg: int) -> list[tuple]:
    """Exponent vectors of degree ``deg`` in decreasing grevlex order."""
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), deg):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=grevlex_key, reverse=True)
    return out


def torus_weights(gens: Sequence[MultiPoly]) -> list[tuple]:
    """Integer weight vectors making every generator homogeneous.

    The Macaulay matrix is block diagonal for the induced multigrading, so
    its rank is the sum of the block ranks.
    """
    nv = gens[0].nvars
    rows = []
    for g in gens:
        e0 = g.terms[0][0]
        for e, _ in g.terms[1:]:
            rows.append([Fraction(a - b) for a, b in zip(e, e0)])
    if not rows:
        return [tuple([1] * nv)] if nv else []
    out = []
    for v in nullspace(ExactMatrix.from_rows(rows)):
        den = math.lcm(*(x.denominator for x in v))
        out.append(tuple(int(x * den) for x in v))
    return out


def _column_count(nvars: int, t: int) -> int:
    return math.comb(nvars - 1 + t, t)


def _field_modulus(field: str | int) -> Optional[int]:
    if field in ("q", "Q"):
        return None
    if field in ("p", "P"):
        return default_prime()
    return check_modulus(int(field))


def macaulay_blocks(gens: Sequence[MultiPoly], t: int) -> list[tuple[list, list[dict]]]:
    """Degree-t Macaulay matrix split by multidegree.

    Returns a list of (columns, rows) pairs: the columns are exponent vectors
    in decreasing grevlex order, and each row is a mapping exponent -> coeff.
    """
    nv = gens[0].nvars
    weights = torus_weights(gens)

    def wkey(e):
        return tuple(sum(w * x for w, x in zip(wt, e)) for wt in weights)

    blocks: dict = {}
    for g in gens:
        s = t - g.degree
        if s < 0 or g.is_zero():
            continue
        for m in monomials(nv, s):
            row = {tuple(a + b for a, b in zip(m, e)): c for e, c in g.terms}
            key = wkey(next(iter(row)))
            blocks.setdefault(key, []).append(row)
    out = []
    for key in sorted(blocks):
        rows = blocks[key]
        cols = sorted({e for r in rows for e in r}, key=grevlex_key, reverse=True)
        out.append((cols, rows))
    return out


def _block_rank(cols: list, rows: list[dict], modulus: Optional[int]) -> int:
    idx = {e: j for j, e in enumerate(cols)}
    if modulus is None:
        ints = []
        for r in rows:
            den = math.lcm(*(Fraction(c).denominator for c in r.values()))
            v = [0] * len(cols)
            for e, c in r.items():
                v[idx[e]] = int(Fraction(c) * den)
            ints.append(v)
        return bareiss_rank(ints)
    a = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for i, r in enumerate(rows):
        for e, c in r.items():
            a[i, idx[e]] = _norm_coeff(c, modulus)
    return rank_mod_p_array(a, modulus)


def _check_gens(gens: Sequence[MultiPoly]) -> int:
    if not gens:
        raise ValueError("no generators")
    nv = gens[0].nvars
    if any(g.nvars != nv for g in gens):
        raise ValueError("generators in different numbers of variables")
    if not all(g.is_homogeneous for g in gens):
        raise ValueError("generators must be homogeneous")
    return nv


def ideal_hilbert_function(gens: Sequence[MultiPoly], t: int, field: str | int = "p") -> int:
    """dim of the degree-t part of the ideal generated by ``gens``.

    ``field`` is "p" (default prime), "q" (rationals) or an explicit prime.
    """
    nv = _check_gens(gens)
    gens = [g for g in gens if not g.is_zero()]
    if not gens or t < min(g.degree for g in gens):
        return 0
    if _column_count(nv, t) > MAX_COLUMNS:
        raise ValueError(f"degree {t} needs more than {MAX_COLUMNS} columns")
    modulus = _field_modulus(field)
    return sum(_block_rank(cols, rows, modulus) for cols, rows in macaulay_blocks(gens, t))


def quotient_hilbert_function(gens: Sequence[MultiPoly], t: int, field: str | int = "p") -> int:
    """h(t) = C(n+t, t) - dim I_t for the scheme cut out by ``gens``."""
    nv = _check_gens(gens)
    return _column_count(nv, t) - ideal_hilbert_function(gens, t, field)


@dataclass(frozen=True)
class Unstable:
    values: tuple


def fit_hilbert_polynomial(gens: Sequence[MultiPoly], r: int, t_max: Optional[int] = None,
                           field: str | int = "p"):
    """Degree-r interpolant of the Hilbert function over its last r+1 values,
    accepted only if it also matches the value just before them."""
    if t_max is None:
        t_max = r + 3
    if t_max < r + 2:
        raise ValueError("t_max must be at least r + 2")
    t0 = t_max - r - 1
    vals = [(t, quotient_hilbert_function(gens, t, field)) for t in range(t0, t_max + 1)]
    p = fit_binomial(vals[1:], r)
    if p is None or p(vals[0][0]) != vals[0][1] or not p.is_integral():
        return Unstable(tuple(vals))
    return p


def lambda_of(p: IntegerValuedPoly) -> int:
    """Degree of the scheme with Hilbert polynomial p."""
    return int(p.leading)
