from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp

from vptosc.optimizer import (
    omega_from_sigma,
    optimize,
    reexpansion_cached,
    scaling_polynomial_cached,
)
from vptosc.oracle import (
    OracleSettings,
    _grid_diagonal,
    _symmetric_grid,
    direct_extremize_wn,
    exact_energy_diag,
    exact_energy_grid,
    first_order_trial_frequency,
)
from vptosc.reexpansion import OscillatorSpec, sigma_of
from vptosc.rootisolation import real_roots


class TestBasisDiagonalization:
    def test_harmonic_limit(self):
        spec = OscillatorSpec(omega=1, g=Fraction(1, 10**12), p=4)
        result = exact_energy_diag(spec)
        assert result.converged
        assert abs(result.energy - 0.5) < 1e-10

    def test_pure_quartic_basis_frequency_independence(self):
        spec = OscillatorSpec(omega=0, g=1, p=4)
        values = []
        for freq in (1.0, 2.0, 3.0):
            r = exact_energy_diag(spec, OracleSettings(basis_frequency=freq))
            assert r.converged
            values.append(r.energy)
        assert max(values) - min(values) <= 1e-9 * abs(values[0])

    def test_default_basis_frequency_is_first_order_trial(self):
        spec = OscillatorSpec(omega=1, g=1, p=4)
        assert abs(first_order_trial_frequency(spec) - 2.0) < 1e-12

    def test_settings_validation(self):
        with pytest.raises(ValueError):
            OracleSettings(basis_dim=8)
        with pytest.raises(ValueError):
            OracleSettings(grid_points=10)


class TestGridSolver:
    def test_harmonic_limit(self):
        spec = OscillatorSpec(omega=1, g=Fraction(1, 10**12), p=4)
        result = exact_energy_grid(spec)
        assert result.converged
        assert abs(result.energy - 0.5) < 1e-8

    @pytest.mark.parametrize("p", [4, 6])
    @pytest.mark.parametrize("g", [Fraction(1, 10), Fraction(1), Fraction(10)])
    def test_cross_oracle_agreement(self, p, g):
        spec = OscillatorSpec(omega=1, g=g, p=p)
        diag = exact_energy_diag(spec)
        grid = exact_energy_grid(spec)
        assert diag.converged and grid.converged
        assert abs(diag.energy - grid.energy) <= 1e-9 * abs(diag.energy)

    def test_reflection_symmetric_assembly(self):
        spec = OscillatorSpec(omega="3/2", g="2/7", p=6)
        for n in (400, 401):
            x, h = _symmetric_grid(n, 9.0)
            diag = _grid_diagonal(spec, x, h)
            assert np.array_equal(x, -x[::-1])
            assert np.array_equal(diag, diag[::-1])

    def test_box_too_small_detected(self):
        spec = OscillatorSpec(omega=1, g=Fraction(1, 10**12), p=4)
        result = exact_energy_grid(spec, OracleSettings(grid_halfwidth=3.0))
        assert not result.converged


class TestPhysicalProperties:
    def test_variational_bound_first_order(self):
        # W_1 at its minimum is the expectation value in a Gaussian trial
        # state: an upper bound on the true ground energy
        for omega, g in ((1, 1), (1, Fraction(1, 10)), (2, 10), (0, 1)):
            spec = OscillatorSpec(omega=omega, g=g, p=4)
            w1 = float(optimize(spec, 1, dps=40).chosen.energy)
            reference = exact_energy_diag(spec)
            assert reference.converged
            assert w1 >= reference.energy - 1e-10

    def test_energy_scaling_law(self):
        # E(lam^((p+2)/2) g, lam omega) = lam E(g, omega)
        spec = OscillatorSpec(omega=1, g=1, p=4)
        base = exact_energy_diag(spec)
        for lam in (0.5, 2.0):
            scaled = OscillatorSpec(omega=Fraction(lam), g=Fraction(lam) ** 3, p=4)
            res = exact_energy_diag(scaled)
            assert res.converged
            assert abs(res.energy - lam * base.energy) <= 1e-9 * abs(res.energy)


class TestDirectExtremize:
    def test_first_order_quartic(self):
        spec = OscillatorSpec(omega=1, g=1, p=4)
        series = reexpansion_cached(4, 1)
        points = direct_extremize_wn(series, spec, 1, dps=40)
        assert len(points) == 1
        om, kind = points[0]
        assert kind == "extremum"
        with mp.workdps(40):
            assert abs(om - 2) < mp.mpf("1e-10")

    def test_sigma_images_equal_polynomial_roots(self):
        spec = OscillatorSpec(omega=1, g=1, p=4)
        series = reexpansion_cached(4, 1)
        points = direct_extremize_wn(series, spec, 1, dps=40)
        sigmas = [sigma_of(spec, om, dps=40) for om, _ in points]
        assert len(sigmas) == 1
        assert abs(sigmas[0] - 6) < 1e-8

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 7])
    def test_stationary_point_count_matches_optimizer(self, n):
        spec = OscillatorSpec(omega=1, g=1, p=4)
        series = reexpansion_cached(4, n)
        points = direct_extremize_wn(series, spec, n, dps=40)
        poly = scaling_polynomial_cached(4, n).poly
        pairs = [
            om
            for sig in (real_roots(poly, dps=40) if poly.degree >= 1 else [])
            for om in omega_from_sigma(spec, sig, dps=40)
        ]
        assert len(points) == len(pairs)
