"""Integer-valued polynomials in binomial basis, base-locus Hilbert
polynomial interpolation, and Castelnuovo-type genus and degree bounds."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .exactmath import ExactMatrix, Inconsistent, Underdetermined, UniqueSolution, solve_linear


def binom(t, k: int) -> Fraction:
    """C(t, k) for any integer or rational t, via the falling factorial."""
    if k < 0:
        return Fraction(0)
    num = Fraction(1)
    for j in range(k):
        num *= t - j
    return num / factorial(k)


@dataclass(frozen=True)
class IntegerValuedPoly:
    """P(t) = sum_k coeffs[k] * C(t, r - k) with r = len(coeffs) - 1."""

    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("at least one coefficient is required")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[0]

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __call__(self, t) -> Fraction:
        return eval_poly(self, t)

    def power_basis(self) -> list[Fraction]:
        """Coefficients c_0..c_r of P(t) = sum c_j t^j (display only)."""
        r = self.degree
        out = [Fraction(0)] * (r + 1)
        for k, a in enumerate(self.coeffs):
            for j, c in enumerate(_binom_power_coeffs(r - k)):
                out[j] += a * c
        return out

    def ints(self) -> list[int]:
        if not self.is_integral():
            raise ValueError("coefficients are not integral")
        return [int(c) for c in self.coeffs]


def _binom_power_coeffs(k: int) -> list[Fraction]:
    poly = [Fraction(1)]
    for j in range(k):
        nxt = [Fraction(0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] += c
            nxt[i] -= j * c
        poly = nxt
    f = factorial(k)
    return [c / f for c in poly]


def eval_poly(p: IntegerValuedPoly, t) -> Fraction:
    r = p.degree
    return sum((a * binom(t, r - k) for k, a in enumerate(p.coeffs)), Fraction(0))


def sectional_genus(p: IntegerValuedPoly) -> int:
    """Arithmetic genus of the curve section: (r-1) a0 - a1 + 1."""
    if p.degree < 1:
        raise ValueError("sectional genus needs a polynomial of degree >= 1")
    if not p.is_integral():
        raise ValueError("sectional genus needs integer coefficients")
    r = p.degree
    return int((r - 1) * p.coeffs[0] - p.coeffs[1] + 1)


@dataclass(frozen=True)
class Determined:
    poly: IntegerValuedPoly


def base_hilbert_conditions(n: int, r: int, delta: int) -> list[tuple[int, Fraction]]:
    """The (t, P(t)) conditions satisfied by the base locus Hilbert polynomial."""
    if delta < 1:
        raise ValueError("delta must be at least 1")
    if (r + delta) % 2:
        raise ValueError("index (r + delta)/2 is not integral")
    i = (r + delta) // 2
    sign = -1 if r % 2 else 1
    q = Fraction(n * n + n - 2, 2)
    conds = [(0, Fraction(1)), (1, Fraction(n + 1)), (2, q)]
    conds += [(-j, Fraction(0)) for j in range(1, i)]
    conds += [(-i, Fraction(sign)), (-i - 1, Fraction(sign * (n + 1))), (-i - 2, sign * q)]
    return conds


def interpolate_base_hilbert(n: int, r: int, delta: int):
    """Solve for the Hilbert polynomial of the base locus from its values and
    the Serre-duality symmetry; returns Determined, Inconsistent or
    Underdetermined."""
    conds = base_hilbert_conditions(n, r, delta)
    i = (r + delta) // 2
    rows = [[binom(t, r - k) for k in range(r + 1)] for t, _ in conds]
    res = solve_linear(ExactMatrix.from_rows(rows), [v for _, v in conds])
    if isinstance(res, (Inconsistent, Underdetermined)):
        return res
    assert isinstance(res, UniqueSolution)
    p = IntegerValuedPoly(res.values)
    if not p.is_integral():
        return Inconsistent()
    sign = -1 if r % 2 else 1
    for t in range(-r - 2, r + 3):
        if p(t) != sign * p(-t - i):
            return Inconsistent()
    return Determined(p)


def fit_binomial(points: Sequence[tuple[int, Fraction]], r: int) -> IntegerValuedPoly | None:
    """Unique degree-r polynomial (binomial basis) through r+1 points."""
    rows = [[binom(t, r - k) for k in range(r + 1)] for t, _ in points]
    res = solve_linear(ExactMatrix.from_rows(rows), [Fraction(v) for _, v in points])
    if not isinstance(res, UniqueSolution):
        return None
    return IntegerValuedPoly(res.values)


def _check_lambda_n(lam: int, N: int) -> None:
    if lam < 1 or N < 2:
        raise ValueError("need lambda >= 1 and N >= 2")


def castelnuovo_pi0(lam: int, N: int) -> int:
    """Castelnuovo's genus bound pi_0(lambda, N)."""
    _check_lambda_n(lam, N)
    q0, r0 = divmod(lam - 1, N)
    return comb(q0, 2) * N + q0 * r0


def _check_theta(lam: int, N: int, theta: int) -> None:
    _check_lambda_n(lam, N)
    if not 0 < theta <= lam - 2 * N - 1:
        raise ValueError(f"theta must satisfy 0 < theta <= lambda - 2N - 1 (got {theta})")


def fano_bound(lam: int, N: int, theta: int) -> int:
    """Fano's refinement pi_0(lambda - theta, N) + theta."""
    _check_theta(lam, N, theta)
    return castelnuovo_pi0(lam - theta, N) + theta


def ciliberto_theta(lam: int, N: int, theta: int) -> int:
    """Ciliberto's refined genus bound."""
    _check_theta(lam, N, theta)
    w = 2 * N + theta
    mu, eta = divmod(lam - 1, w)
    val = mu * mu * w - mu * N + 2 * mu * eta
    if eta >= N:
        val += eta - N
    return val


class _Unbounded:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Unbounded"


Unbounded = _Unbounded()


def max_points_for_h2(N: int, h2: int):
    """Largest known lambda for points imposing h2 conditions on quadrics."""
    if h2 < N + 1:
        raise ValueError("h2 must be at least N + 1")
    if h2 <= 2 * N:
        return h2
    caps = {2 * N + 1: 2 * N + 2, 2 * N + 2: 2 * N + 4, 2 * N + 3: 2 * N + 6, 2 * N + 4: 2 * N + 8}
    return caps.get(h2, Unbounded)


def max_points_condition(N: int, h2: int) -> str | None:
    """Extra hypothesis attached to a cap of ``max_points_for_h2``."""
    if h2 == 2 * N + 3:
        return "symmetric position, N>=4"
    if h2 == 2 * N + 4:
        return "symmetric position, N>=6"
    return None


def egh_decomposition(N: int, m: int) -> tuple[int, int]:
    """The unique (b, c) with m = (N+1) + C(b,2) + c and b > c >= 0."""
    if m < N + 1:
        raise ValueError("m must be at least N + 1")
    k = m - N - 1
    b = 1
    while comb(b + 1, 2) <= k:
        b += 1
    return b, k - comb(b, 2)


def egh_bound(N: int, m: int) -> int:
    """Conjectural degree bound (2b - c + 1) 2^(N - b - 1)."""
    b, c = egh_decomposition(N, m)
    if N - b - 1 < 0:
        raise ValueError("too many quadrics for a zero-dimensional intersection")
    return (2 * b - c + 1) * 2 ** (N - b - 1)


def bounds_report(lam: int, N: int, theta: int) -> dict:
    """All bounds applicable to (lambda, N, theta), as plain data."""
    out = {"lambda": lam, "N": N, "theta_excess": theta,
           "pi0": castelnuovo_pi0(lam, N)}
    try:
        out["fano"] = fano_bound(lam, N, theta)
        out["theta"] = ciliberto_theta(lam, N, theta)
    except ValueError:
        out["fano"] = None
        out["theta"] = None
    h2 = 2 * N + 1 + theta
    cap = max_points_for_h2(N, h2)
    out["h2_min"] = h2
    out["lambda_cap"] = None if cap is Unbounded else cap
    out["lambda_cap_condition"] = max_points_condition(N, h2)
    m = comb(N + 2, 2) - h2
    out["egh_lambda_cap"] = egh_bound(N, m) if m >= N + 1 else None
    return out
