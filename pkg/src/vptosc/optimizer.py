"""Stationary-point search and selection for the variational energy.

The pipeline is: build the scaling polynomial P_N, isolate its real roots in
sigma, map each root back to trial frequencies Omega (inverting the scaling
relation), evaluate the energy and curvature at every candidate, and pick
the flattest extremum. When P_N has no real root (observed at even orders
for the quartic case) the roots of P_N' serve as a flagged turning-point
fallback.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any
from functools import cmp_to_key, lru_cache

from mpmath import mp

from .reexpansion import (
    OscillatorSpec,
    ReexpandedSeries,
    evaluate_wn,
    evaluate_wn_exact,
    reexpand,
    sigma_of_exact,
)
from .rootisolation import rational_roots, real_roots
from .scaling import ScalingPolynomial, build_scaling_polynomial, d2w_domega2
from .series_core import (
    DEFAULT_DPS,
    GUARD_DPS,
    RationalPolynomial,
    bw_series_cached,
)

EXTREMUM = "extremum"
TURNING_POINT = "turning_point"

# Candidates whose flatness agrees to this relative tolerance are treated as
# tied and ranked by sign and magnitude of sigma instead.
FLATNESS_TIE_REL = 1e-6


class NoCandidatesError(Exception):
    """Neither P_N nor P_N' has a usable real root (not expected in scope)."""


@dataclass(frozen=True)
class ExtremumCandidate:
    sigma: Any
    omega_trial: Any
    energy: Any
    flatness: Any
    kind: str


@dataclass(frozen=True)
class VariationalResult:
    spec: OscillatorSpec
    order: int
    chosen: ExtremumCandidate
    all_candidates: tuple[ExtremumCandidate, ...]
    precision_digits: int

    @property
    def used_fallback(self) -> bool:
        return self.chosen.kind == TURNING_POINT


@lru_cache(maxsize=None)
def reexpansion_cached(p: int, order: int) -> ReexpandedSeries:
    return reexpand(bw_series_cached(p, order), order)


@lru_cache(maxsize=None)
def scaling_polynomial_cached(p: int, order: int) -> ScalingPolynomial:
    return build_scaling_polynomial(bw_series_cached(p, order), order)


@lru_cache(maxsize=None)
def _real_roots_cached(poly: RationalPolynomial, dps: int) -> tuple:
    return tuple(real_roots(poly, dps=dps))


def omega_polynomial(spec: OscillatorSpec, sigma: Fraction) -> RationalPolynomial:
    """Polynomial in Omega whose positive roots solve the scaling relation:

    Omega^{(p+2)/2} - omega^2 * Omega^{(p-2)/2} - sigma * g = 0.
    """
    m = (spec.p - 2) // 2
    coeffs = [Fraction(0)] * (m + 3)
    coeffs[0] = -Fraction(sigma) * spec.g
    coeffs[m] = -spec.omega**2
    coeffs[m + 2] = Fraction(1)
    return RationalPolynomial(coeffs)


def _bisect_then_polish(fm, dfm, lo, hi, dps: int):
    """Root of the mpf polynomial (descending coeffs fm) bracketed by [lo, hi]."""
    flo = mp.polyval(fm, lo)
    if flo == 0:
        return lo
    fhi = mp.polyval(fm, hi)
    if fhi == 0:
        return hi
    target = mp.mpf(10) ** (-(dps + 5))
    for _ in range(mp.dps * 4):
        mid = (lo + hi) / 2
        if hi - lo <= target * max(1, abs(mid)):
            break
        fmid = mp.polyval(fm, mid)
        if fmid == 0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    x = (lo + hi) / 2
    for _ in range(4):  # Newton polish
        d = mp.polyval(dfm, x)
        if d == 0:
            break
        x = x - mp.polyval(fm, x) / d
    return x


def omega_from_sigma(spec: OscillatorSpec, sigma, dps: int = DEFAULT_DPS) -> list:
    """All positive trial frequencies with the given scaling-variable value.

    For sigma > 0 there is exactly one (and it exceeds omega); for sigma < 0
    there are zero, one, or two in (0, omega); sigma = 0 maps to omega itself.
    An empty list is a valid outcome.
    """
    p = spec.p
    m = (p - 2) // 2
    with mp.workdps(dps + GUARD_DPS):
        sig = (
            mp.mpf(sigma.numerator) / mp.mpf(sigma.denominator)
            if isinstance(sigma, Fraction)
            else mp.mpf(sigma)
        )
        w = mp.mpf(spec.omega.numerator) / mp.mpf(spec.omega.denominator)
        gv = mp.mpf(spec.g.numerator) / mp.mpf(spec.g.denominator)
        rhs = sig * gv

        # f(Om) = Om^m (Om^2 - w^2) - sigma*g, descending coefficients
        fm = [mp.mpf(0)] * (m + 3)
        fm[0] = mp.mpf(1)
        fm[2] = -(w**2)
        fm[-1] = -rhs
        dfm = [c * (m + 2 - i) for i, c in enumerate(fm[:-1])]

        if sig == 0:
            roots = [w] if w > 0 else []
        elif w == 0:
            roots = [mp.root(rhs, (p + 2) // 2)] if sig > 0 else []
        elif sig > 0:
            hi = max(2 * w, 2 * mp.root(rhs, (p + 2) // 2))
            while mp.polyval(fm, hi) <= 0:
                hi *= 2
            roots = [_bisect_then_polish(fm, dfm, w, hi, dps)]
        else:
            crit = w * mp.sqrt(mp.mpf(m) / (m + 2))
            fcrit = mp.polyval(fm, crit)
            if fcrit > 0:
                roots = []
            elif fcrit == 0:
                roots = [crit]
            else:
                lo = crit / 2
                while mp.polyval(fm, lo) <= 0:
                    lo /= 2
                roots = [
                    _bisect_then_polish(fm, dfm, lo, crit, dps),
                    _bisect_then_polish(fm, dfm, crit, w, dps),
                ]
        with mp.workdps(dps):
            return [+r for r in roots]


def _candidates_for_roots(series, scalpoly, spec, roots, kind, dps):
    cands = []
    for sig in roots:
        for om in omega_from_sigma(spec, sig, dps=dps):
            energy = evaluate_wn(series, spec, om, dps=dps)
            flatness = abs(d2w_domega2(scalpoly, spec, om, dps=dps))
            cands.append(
                ExtremumCandidate(
                    sigma=sig, omega_trial=om, energy=energy, flatness=flatness, kind=kind
                )
            )
    return cands


def _candidate_cmp(a: ExtremumCandidate, b: ExtremumCandidate) -> int:
    fa, fb = a.flatness, b.flatness
    scale = max(abs(fa), abs(fb))
    if scale > 0 and abs(fa - fb) > FLATNESS_TIE_REL * scale:
        return -1 if fa < fb else 1
    # tied flatness: prefer the positive-sigma branch, then the larger sigma
    pa, pb = a.sigma > 0, b.sigma > 0
    if pa != pb:
        return -1 if pa else 1
    if a.sigma != b.sigma:
        return -1 if a.sigma > b.sigma else 1
    return 0


def optimize(
    spec: OscillatorSpec,
    order: int,
    policy: str = "flattest",
    dps: int = DEFAULT_DPS,
) -> VariationalResult:
    """Order-N variational approximation with flattest-extremum selection."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if policy != "flattest":
        raise ValueError(f"unknown selection policy {policy!r}")
    series = reexpansion_cached(spec.p, order)
    scalpoly = scaling_polynomial_cached(spec.p, order)

    roots = _real_roots_cached(scalpoly.poly, dps)
    cands = _candidates_for_roots(series, scalpoly, spec, roots, EXTREMUM, dps)
    if not cands:
        turning = _real_roots_cached(scalpoly.poly.derivative(), dps)
        cands = _candidates_for_roots(series, scalpoly, spec, turning, TURNING_POINT, dps)
    if not cands:
        raise NoCandidatesError(
            f"no stationary or turning-point candidates at order {order} for {spec}"
        )
    cands.sort(key=cmp_to_key(_candidate_cmp))
    return VariationalResult(
        spec=spec,
        order=order,
        chosen=cands[0],
        all_candidates=tuple(cands),
        precision_digits=dps,
    )


@dataclass(frozen=True)
class RationalCandidate:
    sigma: Fraction
    omega_trial: Fraction
    energy: Fraction


def rational_candidates(spec: OscillatorSpec, order: int) -> list[RationalCandidate]:
    """Candidates solvable end-to-end in exact arithmetic.

    Returns only those stationary points where both the scaling-polynomial
    root and the recovered trial frequency are rational (e.g. the entire
    first-order solution for the quartic case at omega = g = 1).
    """
    series = reexpansion_cached(spec.p, order)
    scalpoly = scaling_polynomial_cached(spec.p, order)
    out = []
    for sig in rational_roots(scalpoly.poly):
        for om in rational_roots(omega_polynomial(spec, sig)):
            if om <= 0:
                continue
            assert sigma_of_exact(spec, om) == sig
            out.append(
                RationalCandidate(
                    sigma=sig, omega_trial=om, energy=evaluate_wn_exact(series, spec, om)
                )
            )
    return out


@dataclass(frozen=True)
class ConvergenceRow:
    order: int
    energy: Any
    error: Any
    sigma: Any
    kind: str


@dataclass(frozen=True)
class ConvergenceReport:
    spec: OscillatorSpec
    oracle_energy: Any
    rows: tuple[ConvergenceRow, ...]


def converge_scan(
    spec: OscillatorSpec,
    n_max: int,
    oracle_energy,
    dps: int = DEFAULT_DPS,
) -> ConvergenceReport:
    """One optimize() row per order 1..n_max against a caller-supplied reference."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    rows = []
    with mp.workdps(dps):
        oracle = mp.mpf(oracle_energy)
    for n in range(1, n_max + 1):
        result = optimize(spec, n, dps=dps)
        chosen = result.chosen
        with mp.workdps(dps):
            err = abs(chosen.energy - oracle)
        rows.append(
            ConvergenceRow(
                order=n, energy=chosen.energy, error=err, sigma=chosen.sigma, kind=chosen.kind
            )
        )
    return ConvergenceReport(spec=spec, oracle_energy=oracle, rows=tuple(rows))
