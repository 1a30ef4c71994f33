from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vptosc.series_core import (
    BWSeries,
    RationalPolynomial,
    as_rational,
    binom_general,
    generate_bw_coefficients,
    poly_derivative,
    poly_eval,
)

from oracles import double_factorial_expectation, rs_ground_coefficients

rationals = st.fractions(
    min_value=-10**9, max_value=10**9, max_denominator=10**6
)


class TestBinomGeneral:
    def test_alpha_choose_one_is_alpha(self):
        assert binom_general(Fraction(1, 2), 1) == Fraction(1, 2)
        assert binom_general(Fraction(-1), 1) == -1

    def test_half_choose_two(self):
        # (1/2)(-1/2)/2!
        assert binom_general(Fraction(1, 2), 2) == Fraction(-1, 8)

    def test_choose_zero_is_one(self):
        assert binom_general(Fraction(7, 3), 0) == 1

    def test_negative_k_rejected(self):
        with pytest.raises(ValueError):
            binom_general(Fraction(1, 2), -1)

    @given(alpha=rationals, k=st.integers(min_value=1, max_value=12))
    @settings(max_examples=50, deadline=None)
    def test_pascal_recurrence(self, alpha, k):
        lhs = binom_general(alpha, k)
        rhs = binom_general(alpha - 1, k) + binom_general(alpha - 1, k - 1)
        assert lhs == rhs


class TestRationalInvariants:
    @given(a=rationals, b=rationals)
    @settings(max_examples=100, deadline=None)
    def test_add_round_trip(self, a, b):
        assert (a + b) - b == a

    @given(a=rationals, b=rationals.filter(lambda q: q != 0))
    @settings(max_examples=100, deadline=None)
    def test_mul_round_trip(self, a, b):
        assert (a * b) / b == a

    @given(a=rationals)
    def test_lowest_terms(self, a):
        from math import gcd

        assert a.denominator > 0
        assert gcd(a.numerator, a.denominator) == 1

    def test_string_parsing(self):
        assert as_rational("3/4") == Fraction(3, 4)
        assert as_rational("0.25") == Fraction(1, 4)
        assert as_rational("-21/8") == Fraction(-21, 8)
        assert as_rational(6) == 6


class TestRationalPolynomial:
    def test_trailing_zeros_trimmed(self):
        p = RationalPolynomial([1, 2, 0, 0])
        assert p.coeffs == (Fraction(1), Fraction(2))
        assert p.degree == 1

    def test_zero_polynomial(self):
        z = RationalPolynomial([0, 0])
        assert z.is_zero and z.coeffs == () and z.degree == -1

    def test_derivative_power_rule(self):
        p = RationalPolynomial(["1/3", "-1/2", "5/7"])
        assert poly_derivative(p).coeffs == (Fraction(-1, 2), Fraction(10, 7))

    def test_eval_constant_term(self):
        assert poly_eval(RationalPolynomial(["3/4", "-1/4"]), 0) == Fraction(3, 4)

    def test_eval_at_root(self):
        assert poly_eval(RationalPolynomial(["-3/2", "1/4"]), 6) == 0

    @given(
        a=st.lists(rationals, max_size=6),
        b=st.lists(rationals, max_size=6),
        x=st.fractions(min_value=-100, max_value=100, max_denominator=1000),
    )
    @settings(max_examples=60, deadline=None)
    def test_ring_homomorphism_at_points(self, a, b, x):
        pa, pb = RationalPolynomial(a), RationalPolynomial(b)
        assert poly_eval(pa + pb, x) == poly_eval(pa, x) + poly_eval(pb, x)
        assert poly_eval(pa * pb, x) == poly_eval(pa, x) * poly_eval(pb, x)

    def test_float_eval_matches_exact(self):
        from mpmath import mp

        p = RationalPolynomial(["1/3", "-7/11", "355/113"])
        exact = poly_eval(p, Fraction(9, 7))
        with mp.workdps(40):
            approx = poly_eval(p, mp.mpf(9) / 7)
            assert abs(approx - mp.mpf(exact.numerator) / exact.denominator) < mp.mpf("1e-38")


class TestGenerateBwCoefficients:
    def test_harmonic_limit_order_zero(self):
        assert generate_bw_coefficients(4, 0).coeffs == (Fraction(1, 2),)

    def test_quartic_first_orders(self):
        bw = generate_bw_coefficients(4, 3)
        assert bw.coeffs == (
            Fraction(1, 2),
            Fraction(3, 4),
            Fraction(-21, 8),
            Fraction(333, 16),
        )

    def test_sextic_first_order(self):
        assert generate_bw_coefficients(6, 1).coeffs == (Fraction(1, 2), Fraction(15, 8))

    @pytest.mark.parametrize("p,order", [(4, 8), (6, 6), (8, 5), (10, 4)])
    def test_matches_rayleigh_schroedinger_oracle(self, p, order):
        assert generate_bw_coefficients(p, order).coeffs == tuple(
            rs_ground_coefficients(p, order)
        )

    @pytest.mark.parametrize("p", [4, 6, 8, 10])
    def test_first_order_is_ground_state_moment(self, p):
        # Wick counting: <0|x^p|0> = (p-1)!!/2^(p/2)
        assert generate_bw_coefficients(p, 1).coeffs[1] == double_factorial_expectation(p)

    def test_odd_or_small_power_rejected(self):
        for bad in (3, 5, 2, 0, -4):
            with pytest.raises(ValueError):
                generate_bw_coefficients(bad, 2)

    def test_truncation_is_order_stable(self):
        full = generate_bw_coefficients(4, 12)
        for m in (0, 3, 7):
            assert generate_bw_coefficients(4, m).coeffs == full.coeffs[: m + 1]

    def test_signs_alternate_for_quartic(self):
        bw = generate_bw_coefficients(4, 20)
        for l in range(2, 21):
            assert bw.coeffs[l] * (-1) ** (l + 1) > 0, l

    def test_factorial_growth(self):
        bw = generate_bw_coefficients(4, 25)
        mags = [abs(c) for c in bw.coeffs]
        for l in range(2, 25):
            assert mags[l + 1] > mags[l], l

    def test_validation_of_series_fields(self):
        with pytest.raises(ValueError):
            BWSeries(p=4, level=1, order=0, coeffs=(Fraction(3, 2),))
        with pytest.raises(ValueError):
            BWSeries(p=4, level=0, order=1, coeffs=(Fraction(1, 2),))
        with pytest.raises(ValueError):
            BWSeries(p=4, level=0, order=0, coeffs=(Fraction(1, 3),))


class TestWeakCouplingValidity:
    def test_truncated_series_matches_diagonalization(self):
        # reduced coupling 1e-3: the order-6 truncation sits well inside the
        # asymptotic regime
        from vptosc.oracle import exact_energy_diag
        from vptosc.reexpansion import OscillatorSpec

        spec = OscillatorSpec(omega=1, g=Fraction(1, 1000), p=4)
        bw = generate_bw_coefficients(4, 6)
        ghat = spec.reduced_coupling
        series_value = sum(c * ghat**l for l, c in enumerate(bw.coeffs))
        reference = exact_energy_diag(spec)
        assert reference.converged
        assert abs(float(series_value) - reference.energy) <= 1e-10 * abs(reference.energy)
