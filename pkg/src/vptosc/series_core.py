"""Exact rational/polynomial arithmetic and perturbation-series coefficients.

Everything in this module is exact: coefficients are `fractions.Fraction`
throughout and no floating point enters except in `poly_eval` when the
evaluation point itself is inexact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import mpmath
from mpmath import mp

# Working precision (significant decimal digits) for all floating evaluation.
# Coefficients grow factorially with the expansion order; double precision is
# useless beyond order ~15, 60 digits comfortably covers order <= 30.
DEFAULT_DPS = 60

# Guard digits used internally before rounding results back to the caller's
# precision.
GUARD_DPS = 10

Rational = Fraction

RationalLike = Union[int, str, Fraction]


def as_rational(value: RationalLike | float) -> Fraction:
    """Parse a value into an exact Fraction.

    Accepts ints, Fractions, floats (converted exactly from their binary
    value) and strings in either "num/den" or decimal form ("3/4", "0.25").
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


@lru_cache(maxsize=None)
def binom_general(alpha: Fraction, k: int) -> Fraction:
    """Generalized binomial coefficient alpha*(alpha-1)*...*(alpha-k+1)/k!."""
    if k < 0:
        raise ValueError("k must be >= 0")
    result = Fraction(1)
    for i in range(k):
        result *= alpha - i
    for i in range(2, k + 1):
        result /= i
    return result


def _to_mpf(q: Fraction) -> mpmath.mpf:
    """Round a Fraction to an mpf at the current working precision."""
    return mp.mpf(q.numerator) / mp.mpf(q.denominator)


class RationalPolynomial:
    """Dense univariate polynomial with exact Fraction coefficients.

    Coefficients are stored ascending in powers of the indeterminate, with
    trailing zeros trimmed; the zero polynomial has an empty coefficient
    tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coefficients: Iterable[RationalLike] = ()):
        coeffs = [as_rational(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, power: int) -> Fraction:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return Fraction(0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPolynomial(self[i] + other[i] for i in range(n))

    def __sub__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPolynomial(self[i] - other[i] for i in range(n))

    def __neg__(self) -> "RationalPolynomial":
        return RationalPolynomial(-c for c in self.coeffs)

    def __mul__(self, other: "RationalPolynomial | RationalLike") -> "RationalPolynomial":
        if isinstance(other, RationalPolynomial):
            if self.is_zero or other.is_zero:
                return RationalPolynomial()
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if a == 0:
                    continue
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return RationalPolynomial(out)
        return RationalPolynomial(as_rational(other) * c for c in self.coeffs)

    __rmul__ = __mul__

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def shift_up(self) -> "RationalPolynomial":
        """Multiply by the indeterminate (raise every power by one)."""
        if self.is_zero:
            return self
        return RationalPolynomial((Fraction(0),) + self.coeffs)

    def __call__(self, x):
        return poly_eval(self, x)

    def __repr__(self) -> str:
        return f"RationalPolynomial({list(self.coeffs)!r})"

    def pretty(self, var: str = "x") -> str:
        """Human-readable form like '-3/2 + 1/4*x'."""
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mon = var if i == 1 else f"{var}^{i}"
                if c == 1:
                    parts.append(mon)
                elif c == -1:
                    parts.append(f"-{mon}")
                else:
                    parts.append(f"{c}*{mon}")
        out = parts[0]
        for part in parts[1:]:
            out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
        return out


def poly_add(a: RationalPolynomial, b: RationalPolynomial) -> RationalPolynomial:
    return a + b


def poly_mul(a: RationalPolynomial, b: RationalPolynomial) -> RationalPolynomial:
    return a * b


def poly_derivative(a: RationalPolynomial) -> RationalPolynomial:
    return a.derivative()


def poly_eval(poly: RationalPolynomial, x):
    """Horner evaluation; exact for int/Fraction x, mpf otherwise.

    Floating evaluation rounds each coefficient at the caller's working
    precision, so run it inside `mp.workdps(...)`.
    """
    if isinstance(x, (int, Fraction)):
        acc = Fraction(0)
        for c in reversed(poly.coeffs):
            acc = acc * x + c
        return acc
    xm = mp.mpf(x) if not isinstance(x, mp.mpf) else x
    acc = mp.mpf(0)
    for c in reversed(poly.coeffs):
        acc = acc * xm + _to_mpf(c)
    return acc


@dataclass(frozen=True)
class BWSeries:
    """Weak-coupling ground-state energy coefficients for V = x^2/2 + g*x^p.

    coeffs[l] is the exact order-l coefficient of the energy expansion in the
    reduced coupling (units with unit harmonic frequency); coeffs[0] = 1/2
    for the ground level.
    """

    p: int
    level: int
    order: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        _check_power(self.p)
        if self.level != 0:
            raise ValueError("only the ground level (level=0) is supported")
        if self.order < 0:
            raise ValueError("order must be >= 0")
        if len(self.coeffs) != self.order + 1:
            raise ValueError("coefficient count must equal order + 1")
        if self.coeffs[0] != Fraction(2 * self.level + 1, 2):
            raise ValueError("zeroth coefficient must equal level + 1/2")

    def truncated(self, order: int) -> "BWSeries":
        if order > self.order:
            raise ValueError(f"series only holds order {self.order}")
        return BWSeries(self.p, self.level, order, self.coeffs[: order + 1])


def _check_power(p: int) -> None:
    if p % 2 != 0 or p < 4:
        raise ValueError(f"potential power must be an even integer >= 4, got {p}")


def generate_bw_coefficients(p: int, order: int) -> BWSeries:
    """Ground-state perturbation coefficients via a polynomial wavefunction ansatz.

    Write the ground state as exp(-x^2/2) * sum_k g^k Phi_k(x) with Phi_0 = 1.
    Order-by-order matching of the Schrodinger equation gives

        -Phi_k''/2 + x*Phi_k' + x^p*Phi_{k-1} = sum_{m=1..k} eps_m Phi_{k-m},

    which is solved per order by a downward sweep over monomial degrees
    (Phi_k has degree k*p and, by parity, only even powers). The constant
    component then yields eps_k; the energy coefficient of order k is eps_k,
    and the order-0 value is 1/2. All arithmetic is exact.
    """
    _check_power(p)
    if order < 0:
        raise ValueError("order must be >= 0")

    half_p = p // 2
    # phi[k][i] = coefficient of x^(2i) in Phi_k
    phi: list[list[Fraction]] = [[Fraction(1)]]
    eps: list[Fraction] = [Fraction(0)]  # eps[0] unused

    for k in range(1, order + 1):
        half_len = k * half_p + 1
        c = [Fraction(0)] * half_len
        prev = phi[k - 1]
        for i in range(half_len - 1, 0, -1):
            n = 2 * i
            acc = Fraction(0)
            if i + 1 < half_len:
                acc += Fraction((n + 2) * (n + 1), 2) * c[i + 1]
            j = i - half_p
            if 0 <= j < len(prev):
                acc -= prev[j]
            for m in range(1, k):
                pk = phi[k - m]
                if i < len(pk):
                    acc += eps[m] * pk[i]
            c[i] = acc / n
        phi.append(c)
        eps.append(-c[1] if half_len > 1 else Fraction(0))

    coeffs = (Fraction(1, 2),) + tuple(eps[1 : order + 1])
    return BWSeries(p=p, level=0, order=order, coeffs=coeffs)


@lru_cache(maxsize=None)
def bw_series_cached(p: int, order: int) -> BWSeries:
    """Process-local memoized generation; see vptosc.bwcache for the on-disk cache."""
    return generate_bw_coefficients(p, order)


def rational_str(q: Fraction) -> str:
    """Canonical exact rendering, "num/den" (or plain integer)."""
    return str(q)


def decimal_preview(q: Fraction, digits: int = 15) -> str:
    """Approximate decimal rendering of an exact rational, for display only."""
    with mp.workdps(digits + 5):
        return mp.nstr(_to_mpf(q), digits)
