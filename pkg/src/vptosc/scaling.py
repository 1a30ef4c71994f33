"""Universal scaling polynomial and closed-form derivatives of W_N.

The stationarity condition dW_N/dOmega = 0 collapses to a coupling-independent
polynomial equation P_N(sigma) = 0, with

    P_N(sigma) = -2 * d e_{N+1}(sigma) / d sigma
               = 2 * sum_{j<=N} e_j * binom(alpha_j, N+1-j) * (N+1-j) * (-sigma)^{N-j},

and the derivative itself factorizes as

    dW_N/dOmega = (g / Omega^{(p+2)/2})^N * P_N(sigma(Omega)).

This module builds P_N exactly, evaluates the factorized first and second
derivatives, and exposes the per-order polynomial identities that make the
factorization work as exact (zero-tolerance) verifiers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .reexpansion import OscillatorSpec, ReexpandedSeries, _alpha, reexpansion_poly
from .series_core import (
    DEFAULT_DPS,
    GUARD_DPS,
    BWSeries,
    RationalPolynomial,
    binom_general,
    poly_eval,
)


@dataclass(frozen=True)
class ScalingPolynomial:
    """P_N(sigma): degree-N polynomial whose real roots are the stationary points."""

    p: int
    order: int
    poly: RationalPolynomial

    def __post_init__(self):
        if self.poly.degree != self.order:
            raise ValueError(
                f"scaling polynomial must have degree {self.order}, got {self.poly.degree}"
            )


def build_scaling_polynomial(bw: BWSeries, order: int) -> ScalingPolynomial:
    """Assemble P_N from the explicit coefficient sum (needs e_j for j <= N)."""
    if order > bw.order:
        raise ValueError(f"order {order} exceeds available coefficients ({bw.order})")
    n = order
    coeffs = [Fraction(0)] * (n + 1)
    for j in range(n + 1):
        k = n - j  # power of sigma
        sign = -1 if k % 2 else 1
        coeffs[k] = 2 * bw.coeffs[j] * binom_general(_alpha(bw.p, j), n + 1 - j) * (n + 1 - j) * sign
    return ScalingPolynomial(p=bw.p, order=n, poly=RationalPolynomial(coeffs))


def scaling_polynomial_from_series(bw: BWSeries, order: int) -> ScalingPolynomial:
    """Alternative construction -2 * e_{N+1}'(sigma); needs e_{N+1}, i.e. bw.order >= N+1."""
    e_next = reexpansion_poly(bw, order + 1)
    return ScalingPolynomial(p=bw.p, order=order, poly=e_next.derivative() * Fraction(-2))


def _mpf_of(q: Fraction):
    return mp.mpf(q.numerator) / mp.mpf(q.denominator)


def _sigma_and_coupling(spec: OscillatorSpec, om):
    m = (spec.p - 2) // 2
    w = _mpf_of(spec.omega)
    gv = _mpf_of(spec.g)
    sigma = om**m * (om**2 - w**2) / gv
    coupling = gv / om ** ((spec.p + 2) // 2)
    return sigma, coupling


def dw_domega(
    scalpoly: ScalingPolynomial,
    spec: OscillatorSpec,
    omega_trial,
    dps: int = DEFAULT_DPS,
):
    """Closed-form dW_N/dOmega = (g/Omega^{(p+2)/2})^N * P_N(sigma)."""
    if spec.p != scalpoly.p:
        raise ValueError("scaling polynomial and spec disagree on the potential power")
    with mp.workdps(dps + GUARD_DPS):
        om = mp.mpf(omega_trial)
        if om <= 0:
            raise ValueError("trial frequency must be positive")
        sigma, coupling = _sigma_and_coupling(spec, om)
        result = coupling**scalpoly.order * poly_eval(scalpoly.poly, sigma)
    with mp.workdps(dps):
        return +result


def dsigma_domega(spec: OscillatorSpec, omega_trial, dps: int = DEFAULT_DPS):
    """d sigma / d Omega = [(p+2)/2 * Omega^{p/2} - (p-2)/2 * omega^2 * Omega^{(p-4)/2}] / g."""
    with mp.workdps(dps + GUARD_DPS):
        om = mp.mpf(omega_trial)
        w = _mpf_of(spec.omega)
        gv = _mpf_of(spec.g)
        p = spec.p
        result = (
            mp.mpf(p + 2) / 2 * om ** (p // 2)
            - mp.mpf(p - 2) / 2 * w**2 * om ** ((p - 4) // 2)
        ) / gv
    with mp.workdps(dps):
        return +result


def d2w_domega2(
    scalpoly: ScalingPolynomial,
    spec: OscillatorSpec,
    omega_trial,
    dps: int = DEFAULT_DPS,
):
    """Second derivative of W_N at any Omega:

    d2W/dOmega2 = coupling^N * [P_N'(sigma) dsigma/dOmega
                                - N (p+2) / (2 Omega) * P_N(sigma)].
    """
    if spec.p != scalpoly.p:
        raise ValueError("scaling polynomial and spec disagree on the potential power")
    n = scalpoly.order
    with mp.workdps(dps + GUARD_DPS):
        om = mp.mpf(omega_trial)
        if om <= 0:
            raise ValueError("trial frequency must be positive")
        sigma, coupling = _sigma_and_coupling(spec, om)
        w = _mpf_of(spec.omega)
        gv = _mpf_of(spec.g)
        p = spec.p
        dsig = (
            mp.mpf(p + 2) / 2 * om ** (p // 2)
            - mp.mpf(p - 2) / 2 * w**2 * om ** ((p - 4) // 2)
        ) / gv
        deriv_term = poly_eval(scalpoly.poly.derivative(), sigma) * dsig
        value_term = mp.mpf(n * (p + 2)) / (2 * om) * poly_eval(scalpoly.poly, sigma)
        result = coupling**n * (deriv_term - value_term)
    with mp.workdps(dps):
        return +result


def d2w_domega2_at_extremum(
    scalpoly: ScalingPolynomial,
    spec: OscillatorSpec,
    sigma_root,
    omega_trial,
    dps: int = DEFAULT_DPS,
    residual_rtol: float = 1e-20,
):
    """Second derivative at a stationary point, coupling^N * P_N'(sigma) * dsigma/dOmega.

    Valid only where P_N(sigma) = 0 (the product-rule term proportional to
    P_N drops there); the residual precondition is checked against the
    polynomial's own magnitude scale.
    """
    if spec.p != scalpoly.p:
        raise ValueError("scaling polynomial and spec disagree on the potential power")
    with mp.workdps(dps + GUARD_DPS):
        om = mp.mpf(omega_trial)
        if om <= 0:
            raise ValueError("trial frequency must be positive")
        sig = mp.mpf(sigma_root) if not isinstance(sigma_root, Fraction) else _mpf_of(sigma_root)
        scale = sum(abs(_mpf_of(c)) * abs(sig) ** i for i, c in enumerate(scalpoly.poly.coeffs))
        residual = abs(poly_eval(scalpoly.poly, sig))
        if scale > 0 and residual > residual_rtol * scale:
            raise ValueError(
                f"sigma={sigma_root} is not a stationary point "
                f"(relative residual {mp.nstr(residual / scale, 6)})"
            )
        _, coupling = _sigma_and_coupling(spec, om)
        dsig = dsigma_domega(spec, om, dps=dps)
        result = coupling**scalpoly.order * poly_eval(scalpoly.poly.derivative(), sig) * dsig
    with mp.workdps(dps):
        return +result


# -- Exact identity verifiers -------------------------------------------------
#
# The factorization of dW_N/dOmega rests on two facts, checkable order by
# order in exact arithmetic:
#   (a) every interior term of the derivative sum cancels:
#         (1 - (p+2) l / 2) e_l + (p-2)/2 * sigma e_l' + 2 e_{l+1}' = 0,
#   (b) the binomial recurrence that proves (a):
#         2 binom(a_j, l+1-j) = [((p-2) j / 2 + 2 l - 1)/(j - l - 1)] binom(a_j, l-j),
#       where a_j = (1 - (p+2) j / 2)/2.


def term_identity_residual(series: ReexpandedSeries, l: int) -> RationalPolynomial:
    """(1 - (p+2)l/2) e_l + (p-2)/2 sigma e_l' + 2 e_{l+1}' as an exact polynomial."""
    if not 0 <= l <= series.order - 1:
        raise ValueError(f"l must lie in [0, {series.order - 1}], got {l}")
    p = series.p
    e_l = series.e_polys[l]
    e_next = series.e_polys[l + 1]
    return (
        (1 - Fraction((p + 2) * l, 2)) * e_l
        + Fraction(p - 2, 2) * e_l.derivative().shift_up()
        + Fraction(2) * e_next.derivative()
    )


def verify_term_identity(series: ReexpandedSeries, l: int) -> bool:
    """Exactly check that the interior derivative term of order l cancels."""
    return term_identity_residual(series, l).is_zero


def verify_binomial_identity(p: int, j: int, l: int) -> bool:
    """Exactly check the binomial recurrence (b) above for given p, j <= l."""
    if j > l:
        raise ValueError("need j <= l (the identity divides by j - l - 1)")
    a_j = _alpha(p, j)
    lhs = 2 * binom_general(a_j, l + 1 - j)
    rhs = Fraction(Fraction((p - 2) * j, 2) + 2 * l - 1, j - l - 1) * binom_general(a_j, l - j)
    return lhs == rhs


def combined_identity_residual(series: ReexpandedSeries, l: int) -> RationalPolynomial:
    """(p-2)/2 sigma e_l' + 2 e_{l+1}' - ((p+2)l/2 - 1) e_l as an exact polynomial."""
    if not 0 <= l <= series.order - 1:
        raise ValueError(f"l must lie in [0, {series.order - 1}], got {l}")
    p = series.p
    e_l = series.e_polys[l]
    e_next = series.e_polys[l + 1]
    return (
        Fraction(p - 2, 2) * e_l.derivative().shift_up()
        + Fraction(2) * e_next.derivative()
        - (Fraction((p + 2) * l, 2) - 1) * e_l
    )


def verify_combined_identity(series: ReexpandedSeries, l: int) -> bool:
    """Exactly check (p-2)/2 sigma e_l' + 2 e_{l+1}' = ((p+2)l/2 - 1) e_l."""
    return combined_identity_residual(series, l).is_zero
