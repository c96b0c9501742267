from fractions import Fraction
import cmath
import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from toricheights.cyclotomic import Cyclotomic, cyclotomic_polynomial, norm_integer, totient, units_mod


@pytest.mark.parametrize("N", [1, 2, 3, 5, 8, 12, 15, 30])
def test_cyclotomic_polynomial_matches_sympy(N):
    x = sympy.Symbol("x")
    expected = [int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(N, x), x).all_coeffs())]
    assert list(cyclotomic_polynomial(N)) == expected


def test_totient_and_units():
    assert totient(12) == 4
    assert units_mod(10) == (1, 3, 7, 9)
    assert all(totient(N) == len(units_mod(N)) for N in range(1, 60))


def test_norm_of_two_minus_zeta5_is_phi5_at_two():
    # Norm(2 - zeta) = prod (2 - zeta^u) = Phi_5(2) = 16 + 8 + 4 + 2 + 1
    assert (2 - Cyclotomic.zeta(5)).norm() == 31


def test_norm_of_scaled_root_of_unity():
    assert (Cyclotomic.zeta(5) * Fraction(1, 2)).norm() == Fraction(1, 16)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 101])
def test_norm_of_one_minus_zeta_p_is_p(p):
    assert (1 - Cyclotomic.zeta(p)).norm() == p


def test_cyclotomic_unit_has_norm_one():
    z = Cyclotomic.zeta(5)
    assert (1 + z + z * z).norm() == 1


def test_arithmetic_and_reduction():
    z = Cyclotomic.zeta(5)
    assert z**5 == Cyclotomic.rational(1, 5)
    assert z.inverse() * z == Cyclotomic.rational(1, 5)
    s = Cyclotomic.zeta(3) + Cyclotomic.zeta(4)
    assert s.N == 12
    assert cmath.isclose(s.to_complex(), cmath.exp(2j * math.pi / 3) + 1j, abs_tol=1e-12)


def test_scaled_root_of_unity_detection():
    z = Cyclotomic.zeta(7, 3) * Fraction(-2, 3)
    q, k = z.as_scaled_root_of_unity()
    assert abs(q) == Fraction(2, 3)
    assert cmath.isclose(complex(float(q)) * cmath.exp(2j * math.pi * k / 7), z.to_complex(), abs_tol=1e-12)
    assert (1 + Cyclotomic.zeta(7)).as_scaled_root_of_unity() is None


@settings(max_examples=40, deadline=None)
@given(N=st.sampled_from([3, 5, 7, 9, 11, 13]), coeffs=st.lists(st.integers(-5, 5), min_size=1, max_size=6))
def test_integer_norm_matches_product_of_conjugates(N, coeffs):
    a = Cyclotomic.from_powers(N, {j: c for j, c in enumerate(coeffs) if c})
    if a.is_zero():
        return
    expected = np.prod([complex(c) for c in a.conjugates()])
    assert abs(expected.imag) < 1e-6 * max(1.0, abs(expected))
    assert norm_integer(a) == round(expected.real)


def test_galois_action_permutes_conjugates():
    a = 3 + Cyclotomic.zeta(9, 2)
    assert sorted(abs(c) for c in a.galois(2).conjugates()) == pytest.approx(sorted(abs(c) for c in a.conjugates()))
