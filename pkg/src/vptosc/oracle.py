"""Independent reference energies and a scan-based direct extremizer.

Two method-independent ground-state solvers (truncated oscillator-basis
diagonalization and a finite-difference grid) cross-check each other and
anchor the convergence tests. `direct_extremize_wn` locates the stationary
points of W_N by brute finite-difference scanning in Omega, deliberately
avoiding the scaling-polynomial shortcut so it can serve as its oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np
from mpmath import mp
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal

from .optimizer import omega_from_sigma, scaling_polynomial_cached
from .reexpansion import OscillatorSpec, ReexpandedSeries, evaluate_wn
from .rootisolation import real_roots
from .series_core import DEFAULT_DPS


@dataclass(frozen=True)
class OracleSettings:
    """Discretization controls; None fields are derived from the spec."""

    basis_dim: int = 128
    basis_frequency: float | None = None
    grid_halfwidth: float | None = None
    grid_points: int = 2001
    precision: int = 10  # self-consistency tolerance = 10**-precision

    def __post_init__(self):
        if self.basis_dim < 16:
            raise ValueError("basis_dim must be >= 16")
        if self.grid_points < 64:
            raise ValueError("grid_points must be >= 64")


@dataclass(frozen=True)
class OracleResult:
    energy: float
    converged: bool


def first_order_trial_frequency(spec: OscillatorSpec) -> float:
    """The order-1 variational Omega: a cheap, well-adapted basis frequency."""
    p1 = scaling_polynomial_cached(spec.p, 1).poly
    sigma1 = -p1.coeffs[0] / p1.coeffs[1]
    roots = omega_from_sigma(spec, sigma1, dps=20)
    return float(roots[0])


def _resolve(spec: OscillatorSpec, settings: OracleSettings | None) -> OracleSettings:
    settings = settings or OracleSettings()
    if settings.basis_frequency is None or settings.grid_halfwidth is None:
        omega1 = first_order_trial_frequency(spec)
        if settings.basis_frequency is None:
            settings = replace(settings, basis_frequency=omega1)
        if settings.grid_halfwidth is None:
            # ground state falls off at least like exp(-omega1 x^2 / 2)
            settings = replace(settings, grid_halfwidth=float(np.sqrt(100.0 / omega1)))
    return settings


def _lowest_eigenvalue_basis(spec: OscillatorSpec, dim: int, freq: float) -> float:
    """Ground energy in a dim-state oscillator basis of the given frequency.

    The position matrix is built from ladder-operator rules in a buffered
    space (2p extra states) so the truncated power x^p is exact on the
    retained block.
    """
    p = spec.p
    nb = dim + 2 * p
    off = np.sqrt((np.arange(1, nb)) / (2.0 * freq))
    x = np.zeros((nb, nb))
    idx = np.arange(nb - 1)
    x[idx, idx + 1] = off
    x[idx + 1, idx] = off
    xp = np.linalg.matrix_power(x, p)[:dim, :dim]
    x2 = (x @ x)[:dim, :dim]
    w2 = float(spec.omega) ** 2
    h = np.diag((np.arange(dim) + 0.5) * freq)
    h += 0.5 * (w2 - freq**2) * x2
    h += float(spec.g) * xp
    return float(np.linalg.eigvalsh(h)[0])


def exact_energy_diag(spec: OscillatorSpec, settings: OracleSettings | None = None) -> OracleResult:
    """Ground energy by basis diagonalization, with a doubling self-check."""
    if spec.level != 0:
        raise ValueError("oracle supports the ground level only")
    settings = _resolve(spec, settings)
    tol = 10.0 ** (-settings.precision)
    e1 = _lowest_eigenvalue_basis(spec, settings.basis_dim, settings.basis_frequency)
    e2 = _lowest_eigenvalue_basis(spec, 2 * settings.basis_dim, settings.basis_frequency)
    converged = abs(e2 - e1) <= tol * max(1.0, abs(e2))
    return OracleResult(energy=e2, converged=converged)


def _symmetric_grid(n: int, halfwidth: float) -> tuple[np.ndarray, float]:
    """n interior points, bitwise symmetric about 0; walls at +-halfwidth."""
    h = 2.0 * halfwidth / (n + 1)
    m = n // 2
    if n % 2:
        pos = h * np.arange(1, m + 1)
        x = np.concatenate([-pos[::-1], [0.0], pos])
    else:
        pos = h * (np.arange(m) + 0.5)
        x = np.concatenate([-pos[::-1], pos])
    return x, h


def _grid_diagonal(spec: OscillatorSpec, x: np.ndarray, h: float) -> np.ndarray:
    # build from x*x so mirrored points give bit-identical entries
    x2 = x * x
    v = 0.5 * float(spec.omega) ** 2 * x2 + float(spec.g) * x2 ** (spec.p // 2)
    return 1.0 / h**2 + v


def _lowest_eigenvalue_grid(spec: OscillatorSpec, n: int, halfwidth: float) -> float:
    x, h = _symmetric_grid(n, halfwidth)
    diag = _grid_diagonal(spec, x, h)
    offdiag = np.full(n - 1, -0.5 / h**2)
    return float(eigvalsh_tridiagonal(diag, offdiag, select="i", select_range=(0, 0))[0])


def exact_energy_grid(spec: OscillatorSpec, settings: OracleSettings | None = None) -> OracleResult:
    """Ground energy on a Dirichlet grid, Richardson-extrapolated in the step.

    The central-difference eigenvalue has an O(h^2) error; combining the
    n-point and (2n+1)-point grids (exact halving of h) cancels it. The
    convergence flag checks both the extrapolation residual (via a third,
    coarser grid) and the wavefunction tail at the box walls.
    """
    if spec.level != 0:
        raise ValueError("oracle supports the ground level only")
    settings = _resolve(spec, settings)
    tol = 10.0 ** (-settings.precision)
    n = settings.grid_points
    lw = settings.grid_halfwidth

    e_coarse = _lowest_eigenvalue_grid(spec, n // 2, lw)
    e_mid = _lowest_eigenvalue_grid(spec, n, lw)
    e_fine = _lowest_eigenvalue_grid(spec, 2 * n + 1, lw)

    h_coarse = 2.0 * lw / (n // 2 + 1)
    h_mid = 2.0 * lw / (n + 1)
    h_fine = h_mid / 2.0

    def richardson(ea, ha, eb, hb):
        return (eb * ha**2 - ea * hb**2) / (ha**2 - hb**2)

    energy = richardson(e_mid, h_mid, e_fine, h_fine)
    check = richardson(e_coarse, h_coarse, e_mid, h_mid)
    step_ok = abs(energy - check) <= tol * max(1.0, abs(energy))

    # box check: ground-state amplitude must be negligible at the walls
    x, h = _symmetric_grid(n, lw)
    diag = _grid_diagonal(spec, x, h)
    offdiag = np.full(n - 1, -0.5 / h**2)
    _, vec = eigh_tridiagonal(diag, offdiag, select="i", select_range=(0, 0))
    psi = np.abs(vec[:, 0])
    tail_ok = max(psi[0], psi[-1]) <= 1e-8 * psi.max()

    return OracleResult(energy=energy, converged=step_ok and tail_ok)


def direct_extremize_wn(
    series: ReexpandedSeries,
    spec: OscillatorSpec,
    order: int,
    dps: int = DEFAULT_DPS,
    num_points: int = 1600,
) -> list[tuple]:
    """Stationary points of W_N(g, .) by finite-difference sign scanning.

    Scans a logarithmic Omega grid covering every branch the scaling
    analysis can produce, brackets sign changes of the numerical derivative,
    and refines each by bisection. No use is made of the scaling polynomial
    beyond sizing the search window.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    sigma_roots = real_roots(scaling_polynomial_cached(spec.p, order).poly, dps=20)
    sigma_top = max([abs(r) for r in sigma_roots], default=mp.mpf(1))

    with mp.workdps(dps):
        w = mp.mpf(spec.omega.numerator) / mp.mpf(spec.omega.denominator)
        gv = mp.mpf(spec.g.numerator) / mp.mpf(spec.g.denominator)
        omega_top = 10 * mp.root(sigma_top * gv, (spec.p + 2) // 2) + 10 * w
        omega_bot = w / 10 + omega_top * mp.mpf("1e-6")

        fd_h = mp.mpf(10) ** (-dps // 3)

        def deriv(om):
            step = om * fd_h
            return (
                evaluate_wn(series, spec, om + step, dps=dps)
                - evaluate_wn(series, spec, om - step, dps=dps)
            ) / (2 * step)

        ratio = omega_top / omega_bot
        grid = [omega_bot * ratio ** (mp.mpf(i) / (num_points - 1)) for i in range(num_points)]
        values = [evaluate_wn(series, spec, om, dps=dps) for om in grid]
        slopes = [
            (values[i + 1] - values[i]) / (grid[i + 1] - grid[i])
            for i in range(num_points - 1)
        ]

        def refine(lo, dlo, hi):
            for _ in range(int(mp.dps * 3.5)):
                mid = (lo + hi) / 2
                if hi - lo <= abs(mid) * mp.mpf(10) ** (-dps // 2):
                    break
                dmid = deriv(mid)
                if dmid == 0:
                    return mid
                if (dmid > 0) == (dlo > 0):
                    lo, dlo = mid, dmid
                else:
                    hi = mid
            return (lo + hi) / 2

        stationary = []
        for i in range(len(slopes) - 1):
            if slopes[i] == 0:
                continue
            if (slopes[i] > 0) != (slopes[i + 1] > 0):
                # sub-scan the bracket so the bisection starts from a genuine
                # sign change of the derivative itself
                a, b = grid[i], grid[i + 2]
                sub = [a + (b - a) * mp.mpf(k) / 24 for k in range(25)]
                dsub = [deriv(om) for om in sub]
                for k in range(24):
                    if dsub[k] == 0:
                        stationary.append(sub[k])
                    elif (dsub[k] > 0) != (dsub[k + 1] > 0):
                        stationary.append(refine(sub[k], dsub[k], sub[k + 1]))

        stationary.sort()
        deduped = []
        for om in stationary:
            if not deduped or abs(om - deduped[-1]) > 1e-9 * abs(om):
                deduped.append(om)
        return [(om, "extremum") for om in deduped]
