"""Exact arithmetic and dense linear algebra over Q and prime fields.

Rationals are ``fractions.Fraction``. Prime-field matrices are eliminated by
the kernels in ``qbt._kernels``; rational matrices use fraction-free Bareiss
elimination on integer-scaled rows.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels

Rational = Fraction

DEFAULT_PRIME = 2147483647
SECOND_PRIME = 2147483629
MIN_PRIME = 1 << 20


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_modulus(p: int) -> int:
    p = int(p)
    if p < MIN_PRIME or p >= 1 << 31 or not is_prime(p):
        raise ValueError(f"modulus must be a prime in [2^20, 2^31): {p}")
    return p


def default_prime() -> int:
    """The working prime, overridable through ``QBT_PRIME``."""
    env = os.environ.get("QBT_PRIME")
    if env:
        return check_modulus(int(env))
    return DEFAULT_PRIME


def second_prime() -> int:
    """A prime distinct from ``default_prime()`` used to double-check ranks."""
    p = default_prime()
    return SECOND_PRIME if p != SECOND_PRIME else DEFAULT_PRIME


def to_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} exactly to a rational")


@dataclass(frozen=True)
class PrimeFieldElem:
    value: int
    p: int

    def __post_init__(self):
        check_modulus(self.p)
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _coerce(self, other):
        if isinstance(other, PrimeFieldElem):
            if other.p != self.p:
                raise ValueError("mixed moduli")
            return other.value
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldElem(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldElem(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldElem(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldElem(self.value * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return PrimeFieldElem(-self.value, self.p)

    def inverse(self) -> "PrimeFieldElem":
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero in GF(p)")
        return PrimeFieldElem(pow(self.value, self.p - 2, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * PrimeFieldElem(o, self.p).inverse()

    def __eq__(self, other):
        if isinstance(other, PrimeFieldElem):
            return self.p == other.p and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == self._coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0


@dataclass(frozen=True)
class ExactMatrix:
    """Dense matrix over Q (``modulus is None``) or GF(modulus)."""

    rows: int
    cols: int
    entries: tuple
    modulus: int | None = None

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows * cols")
        if self.modulus is not None:
            check_modulus(self.modulus)

    @classmethod
    def from_rows(cls, data: Sequence[Sequence], modulus: int | None = None) -> "ExactMatrix":
        data = [list(r) for r in data]
        rows = len(data)
        cols = len(data[0]) if rows else 0
        if any(len(r) != cols for r in data):
            raise ValueError("ragged rows")
        flat = []
        for r in data:
            for x in r:
                if modulus is None:
                    flat.append(to_rational(x))
                else:
                    flat.append(_reduce_mod(x, modulus))
        return cls(rows, cols, tuple(flat), modulus)

    def row(self, i: int) -> list:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def to_rows(self) -> list[list]:
        return [self.row(i) for i in range(self.rows)]

    def reduce(self, p: int) -> "ExactMatrix":
        """Image of a rational matrix in GF(p) (denominators must be units)."""
        if self.modulus is not None:
            raise ValueError("matrix is already over a prime field")
        return ExactMatrix(self.rows, self.cols,
                           tuple(_reduce_mod(x, p) for x in self.entries), p)


def _reduce_mod(x, p: int) -> int:
    if isinstance(x, PrimeFieldElem):
        if x.p != p:
            raise ValueError("mixed moduli")
        return x.value
    x = to_rational(x)
    if x.denominator % p == 0:
        raise ZeroDivisionError(f"denominator divisible by {p}")
    return x.numerator * pow(x.denominator, -1, p) % p


def _integer_rows(rows: list[list[Fraction]]) -> list[list[int]]:
    out = []
    for r in rows:
        den = 1
        for x in r:
            den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(x * den) for x in r])
    return out


def bareiss_rank(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free Bareiss elimination."""
    a = [list(r) for r in rows if any(r)]
    if not a:
        return 0
    m, n = len(a), len(a[0])
    rank, prev = 0, 1
    for c in range(n):
        if rank == m:
            break
        piv = next((i for i in range(rank, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        pv = a[rank][c]
        for i in range(rank + 1, m):
            ai = a[i]
            f = ai[c]
            ar = a[rank]
            for j in range(c + 1, n):
                ai[j] = (pv * ai[j] - f * ar[j]) // prev
            ai[c] = 0
        prev = pv
        rank += 1
    return rank


def rank_mod_p_array(a: np.ndarray, p: int) -> int:
    """Rank of an int64 array (entries in [0, p)) over GF(p)."""
    return _kernels.rank_mod_p(a, p)


def rank(m: ExactMatrix) -> int:
    """Exact rank over the matrix's field."""
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.modulus is not None:
        arr = np.array(m.entries, dtype=np.int64).reshape(m.rows, m.cols)
        return rank_mod_p_array(arr, m.modulus)
    return bareiss_rank(_integer_rows(m.to_rows()))


def gated_rank(int_rows: list[list[int]]) -> int:
    """Rank of an integer matrix, checked at two primes and escalated to Q on
    disagreement."""
    if not int_rows:
        return 0
    arr = np.array(int_rows, dtype=object)
    p1, p2 = default_prime(), second_prime()
    r1 = rank_mod_p_array(np.array(arr % p1, dtype=np.int64), p1)
    r2 = rank_mod_p_array(np.array(arr % p2, dtype=np.int64), p2)
    if r1 == r2:
        return r1
    return bareiss_rank(int_rows)


@dataclass(frozen=True)
class UniqueSolution:
    values: tuple


@dataclass(frozen=True)
class Inconsistent:
    pass


@dataclass(frozen=True)
class Underdetermined:
    dim: int


def _field_ops(modulus):
    if modulus is None:
        return (lambda x: to_rational(x)), (lambda x: 1 / x)
    return (lambda x: _reduce_mod(x, modulus)), (lambda x: pow(x, modulus - 2, modulus))


def rref(rows: list[list], modulus: int | None = None) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns."""
    conv, inv = _field_ops(modulus)
    a = [[conv(x) for x in r] for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        iv = inv(a[r][c])
        a[r] = [x * iv for x in a[r]]
        if modulus is not None:
            a[r] = [x % modulus for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
                if modulus is not None:
                    a[i] = [x % modulus for x in a[i]]
        pivots.append(c)
        r += 1
    return a, pivots


def solve_linear(m: ExactMatrix, rhs: Sequence):
    """Classify and solve ``m x = rhs`` exactly."""
    if len(rhs) != m.rows:
        raise ValueError("rhs length must equal the number of rows")
    aug = [row + [b] for row, b in zip(m.to_rows(), rhs)]
    red, pivots = rref(aug, m.modulus)
    if m.cols in pivots:
        return Inconsistent()
    if len(pivots) < m.cols:
        return Underdetermined(m.cols - len(pivots))
    sol = [None] * m.cols
    for i, c in enumerate(pivots):
        sol[c] = red[i][m.cols]
    return UniqueSolution(tuple(sol))


def nullspace(m: ExactMatrix) -> list[list]:
    """Basis of the right kernel."""
    zero = Fraction(0) if m.modulus is None else 0
    one = Fraction(1) if m.modulus is None else 1
    red, pivots = rref(m.to_rows(), m.modulus)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * m.cols
        v[f] = one
        for i, c in enumerate(pivots):
            v[c] = -red[i][f]
            if m.modulus is not None:
                v[c] %= m.modulus
        basis.append(v)
    return basis


def mat_vec(m: ExactMatrix, x: Sequence) -> list:
    out = []
    for i in range(m.rows):
        s = sum((a * b for a, b in zip(m.row(i), x)), Fraction(0) if m.modulus is None else 0)
        out.append(s % m.modulus if m.modulus is not None else s)
    return out
