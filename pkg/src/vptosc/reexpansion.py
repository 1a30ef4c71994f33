"""Reexpansion of the weak-coupling series around a trial harmonic frequency.

Splitting the quadratic term (omega^2/2) x^2 into a trial part (Omega^2/2) x^2
plus a remainder and reexpanding the energy series to finite order N yields
per-order polynomials e_l in the scaling variable

    sigma = Omega^{(p-2)/2} (Omega^2 - omega^2) / g,

and the truncated variational energy

    W_N(g, Omega) = Omega * sum_{l<=N} e_l(sigma) * (g / Omega^{(p+2)/2})^l.

For even p the exponents (p+-2)/2 are integers, so every quantity here is an
exact rational function of (omega^2, g, Omega); the floating path only rounds
at evaluation time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .series_core import (
    DEFAULT_DPS,
    GUARD_DPS,
    BWSeries,
    RationalLike,
    RationalPolynomial,
    as_rational,
    binom_general,
    poly_eval,
)


@dataclass(frozen=True)
class OscillatorSpec:
    """Problem definition for V(x) = omega^2 x^2 / 2 + g x^p (hbar = m = 1).

    omega and g are stored as exact rationals; float inputs are converted
    exactly from their binary value. omega = 0 is the strong-coupling
    (pure power-law) limit.
    """

    omega: Fraction
    g: Fraction
    p: int
    level: int = 0

    def __post_init__(self):
        object.__setattr__(self, "omega", as_rational(self.omega))
        object.__setattr__(self, "g", as_rational(self.g))
        if self.p % 2 != 0 or self.p < 4:
            raise ValueError(f"potential power must be an even integer >= 4, got {self.p}")
        if self.g <= 0:
            raise ValueError("coupling g must be positive")
        if self.omega < 0:
            raise ValueError("frequency omega must be non-negative")
        if self.level != 0:
            raise ValueError("only the ground level (level=0) is supported")

    @property
    def reduced_coupling(self) -> Fraction:
        """g / omega^{(p+2)/2}; defined only for omega > 0."""
        if self.omega == 0:
            raise ValueError("reduced coupling is undefined at omega = 0")
        return self.g / self.omega ** ((self.p + 2) // 2)


@dataclass(frozen=True)
class ReexpandedSeries:
    """Per-order polynomials e_l(sigma) of the reexpanded energy series."""

    p: int
    order: int
    e_polys: tuple[RationalPolynomial, ...]

    def __post_init__(self):
        if len(self.e_polys) != self.order + 1:
            raise ValueError("need exactly order + 1 polynomials")

    def truncated(self, order: int) -> "ReexpandedSeries":
        if order > self.order:
            raise ValueError(f"series only holds order {self.order}")
        return ReexpandedSeries(self.p, order, self.e_polys[: order + 1])


def _alpha(p: int, j: int) -> Fraction:
    """Exponent-derived binomial argument (1 - (p+2) j / 2) / 2."""
    return Fraction(2 - (p + 2) * j, 4)


def reexpansion_poly(bw: BWSeries, l: int) -> RationalPolynomial:
    """e_l(sigma) = sum_{j<=l} e_j * binom(alpha_j, l-j) * (-sigma)^{l-j}."""
    if l > bw.order:
        raise ValueError(f"order {l} exceeds available coefficients ({bw.order})")
    coeffs = []
    for k in range(l + 1):  # k = power of sigma, j = l - k
        j = l - k
        sign = -1 if k % 2 else 1
        coeffs.append(sign * bw.coeffs[j] * binom_general(_alpha(bw.p, j), k))
    return RationalPolynomial(coeffs)


def reexpand(bw: BWSeries, order: int) -> ReexpandedSeries:
    """Build e_0(sigma) ... e_order(sigma); requires bw.order >= order."""
    if order > bw.order:
        raise ValueError(f"order {order} exceeds available coefficients ({bw.order})")
    return ReexpandedSeries(
        p=bw.p,
        order=order,
        e_polys=tuple(reexpansion_poly(bw, l) for l in range(order + 1)),
    )


def sigma_of_exact(spec: OscillatorSpec, omega_trial: RationalLike) -> Fraction:
    """Exact scaling variable Omega^{(p-2)/2} (Omega^2 - omega^2) / g."""
    omega_trial = as_rational(omega_trial)
    if omega_trial <= 0:
        raise ValueError("trial frequency must be positive")
    m = (spec.p - 2) // 2
    return omega_trial**m * (omega_trial**2 - spec.omega**2) / spec.g


def sigma_of(spec: OscillatorSpec, omega_trial, dps: int = DEFAULT_DPS):
    """Scaling variable at working precision; exact inputs go the exact route."""
    if isinstance(omega_trial, (int, Fraction)):
        return sigma_of_exact(spec, omega_trial)
    with mp.workdps(dps + GUARD_DPS):
        om = mp.mpf(omega_trial)
        if om <= 0:
            raise ValueError("trial frequency must be positive")
        m = (spec.p - 2) // 2
        w = mp.mpf(spec.omega.numerator) / mp.mpf(spec.omega.denominator)
        gv = mp.mpf(spec.g.numerator) / mp.mpf(spec.g.denominator)
        sigma = om**m * (om**2 - w**2) / gv
    with mp.workdps(dps):
        return +sigma


def evaluate_wn_exact(
    series: ReexpandedSeries, spec: OscillatorSpec, omega_trial: RationalLike
) -> Fraction:
    """Exact rational W_N for rational trial frequency."""
    omega_trial = as_rational(omega_trial)
    if omega_trial <= 0:
        raise ValueError("trial frequency must be positive")
    if spec.p != series.p:
        raise ValueError("series and spec disagree on the potential power")
    sigma = sigma_of_exact(spec, omega_trial)
    coupling = spec.g / omega_trial ** ((spec.p + 2) // 2)
    total = Fraction(0)
    power = Fraction(1)
    for poly in series.e_polys:
        total += poly_eval(poly, sigma) * power
        power *= coupling
    return omega_trial * total


def evaluate_wn(
    series: ReexpandedSeries,
    spec: OscillatorSpec,
    omega_trial,
    dps: int = DEFAULT_DPS,
):
    """Truncated variational energy W_N(g, Omega) at working precision."""
    if spec.p != series.p:
        raise ValueError("series and spec disagree on the potential power")
    with mp.workdps(dps + GUARD_DPS):
        om = mp.mpf(omega_trial) if not isinstance(omega_trial, Fraction) else (
            mp.mpf(omega_trial.numerator) / mp.mpf(omega_trial.denominator)
        )
        if om <= 0:
            raise ValueError("trial frequency must be positive")
        m = (spec.p - 2) // 2
        w = mp.mpf(spec.omega.numerator) / mp.mpf(spec.omega.denominator)
        gv = mp.mpf(spec.g.numerator) / mp.mpf(spec.g.denominator)
        sigma = om**m * (om**2 - w**2) / gv
        coupling = gv / om ** ((spec.p + 2) // 2)
        total = mp.mpf(0)
        power = mp.mpf(1)
        for poly in series.e_polys:
            total += poly_eval(poly, sigma) * power
            power *= coupling
        result = om * total
    with mp.workdps(dps):
        return +result
